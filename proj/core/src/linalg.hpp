#pragma once

#include <vector>

namespace sllg::detail {

// Dense LU with partial pivoting, row-major storage.  Sized for the
// midpoint Jacobians (a few hundred unknowns), nothing fancier needed.
struct LuFactors {
  int n = 0;
  std::vector<double> lu;   // packed L (unit diagonal) and U
  std::vector<int> piv;

  // Returns false on a (numerically) singular pivot.
  bool factor(std::vector<double> a, int n);
  void solve(std::vector<double>& rhs) const;  // in place
};

}  // namespace sllg::detail
