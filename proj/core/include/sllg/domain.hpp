#pragma once

#include <array>
#include <memory>
#include <vector>

namespace sllg {

class Domain;
using DomainPtr = std::shared_ptr<const Domain>;

// Rectangular box with the Neumann cosine basis per axis,
//   e_0 = 1/sqrt(L),  e_k = sqrt(2/L) cos(k pi x / L)  for k >= 1,
// tensorized across axes and truncated to k_i < modes(i).  Collocation
// points are midpoints x_j = (j + 1/2) L / N; the quadrature
// sum_j w f(x_j), w = prod_i L_i / N_i, integrates cos(k pi x / L)
// exactly for 0 <= k < 2N per axis.  Everything downstream (projection,
// adjointness, the pointwise-orthogonality transfers) leans on that
// exactness, so grid sizes must satisfy N >= modes.
//
// Internally there are always two axes; a 1-D domain carries a dummy
// second axis with L = 1, n = N = 1 whose only basis function is the
// constant 1, so 1-D and 2-D share all code paths.
class Domain {
 public:
  static DomainPtr make(int dim, std::array<double, 2> lengths,
                        std::array<int, 2> modes, std::array<int, 2> grid);
  static DomainPtr make_1d(double length, int modes, int grid);
  static DomainPtr make_2d(double lx, double ly, int modes_per_axis,
                           int grid_per_axis);

  int dim() const { return dim_; }
  double length(int axis) const { return length_[axis]; }
  int modes(int axis) const { return n_[axis]; }
  int grid(int axis) const { return N_[axis]; }
  long num_modes() const { return static_cast<long>(n_[0]) * n_[1]; }
  long num_grid() const { return static_cast<long>(N_[0]) * N_[1]; }
  double volume() const { return length_[0] * length_[1]; }

  // Flat mode index is k0 * modes(1) + k1; flat grid index j0 * grid(1) + j1.
  long mode_index(int k0, int k1 = 0) const {
    return static_cast<long>(k0) * n_[1] + k1;
  }
  long grid_index(int j0, int j1 = 0) const {
    return static_cast<long>(j0) * N_[1] + j1;
  }

  // Laplacian eigenvalue of the flat mode: mu = sum_i (k_i pi / L_i)^2.
  double eigenvalue(long flat) const {
    return mu_[0][flat / n_[1]] + mu_[1][flat % n_[1]];
  }
  double max_eigenvalue() const;
  double cell_weight() const { return weight_; }
  double grid_coord(int axis, int j) const {
    return (j + 0.5) * length_[axis] / N_[axis];
  }

  // basis(a)[k * grid(a) + j] = e_k(x_j); basis_deriv holds e_k'(x_j).
  const std::vector<double>& basis(int axis) const { return basis_[axis]; }
  const std::vector<double>& basis_deriv(int axis) const {
    return dbasis_[axis];
  }
  const std::vector<double>& axis_eigenvalues(int axis) const {
    return mu_[axis];
  }

  // Same box and mode set; collocation resolution may differ.
  bool same_modes(const Domain& other) const;

 private:
  Domain() = default;

  int dim_ = 1;
  std::array<double, 2> length_{};
  std::array<int, 2> n_{};
  std::array<int, 2> N_{};
  double weight_ = 0;
  std::array<std::vector<double>, 2> basis_;
  std::array<std::vector<double>, 2> dbasis_;
  std::array<std::vector<double>, 2> mu_;
};

}  // namespace sllg
