#include "linalg.hpp"

#include <cmath>
#include <utility>

namespace sllg::detail {

bool LuFactors::factor(std::vector<double> a, int size) {
  n = size;
  lu = std::move(a);
  piv.resize(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    double best_abs = std::fabs(lu[static_cast<size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(lu[static_cast<size_t>(r) * n + col]);
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best_abs == 0.0) return false;
    if (best != col) {
      for (int c = 0; c < n; ++c)
        std::swap(lu[static_cast<size_t>(best) * n + c],
                  lu[static_cast<size_t>(col) * n + c]);
      std::swap(piv[best], piv[col]);
    }
    const double d = lu[static_cast<size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      double* row = lu.data() + static_cast<size_t>(r) * n;
      const double f = row[col] / d;
      row[col] = f;
      if (f == 0.0) continue;
      const double* prow = lu.data() + static_cast<size_t>(col) * n;
      for (int c = col + 1; c < n; ++c) row[c] -= f * prow[c];
    }
  }
  return true;
}

void LuFactors::solve(std::vector<double>& rhs) const {
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = rhs[piv[i]];
  for (int i = 0; i < n; ++i) {
    const double* row = lu.data() + static_cast<size_t>(i) * n;
    double s = b[i];
    for (int c = 0; c < i; ++c) s -= row[c] * b[c];
    b[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    const double* row = lu.data() + static_cast<size_t>(i) * n;
    double s = b[i];
    for (int c = i + 1; c < n; ++c) s -= row[c] * b[c];
    b[i] = s / row[i];
  }
  rhs = std::move(b);
}

}  // namespace sllg::detail
