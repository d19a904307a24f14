#include "sllg/domain.hpp"

#include <cmath>
#include <string>

#include "sllg/errors.hpp"

namespace sllg {

namespace {

constexpr double kPi = 3.14159265358979323846;

void fill_axis_tables(double L, int n, int N, std::vector<double>& basis,
                      std::vector<double>& dbasis, std::vector<double>& mu) {
  basis.assign(static_cast<size_t>(n) * N, 0.0);
  dbasis.assign(static_cast<size_t>(n) * N, 0.0);
  mu.assign(n, 0.0);
  const double a0 = 1.0 / std::sqrt(L);
  const double ak = std::sqrt(2.0 / L);
  for (int k = 0; k < n; ++k) {
    const double freq = k * kPi / L;
    mu[k] = freq * freq;
    const double amp = (k == 0) ? a0 : ak;
    for (int j = 0; j < N; ++j) {
      const double x = (j + 0.5) * L / N;
      basis[static_cast<size_t>(k) * N + j] = amp * std::cos(freq * x);
      dbasis[static_cast<size_t>(k) * N + j] = -amp * freq * std::sin(freq * x);
    }
  }
}

}  // namespace

DomainPtr Domain::make(int dim, std::array<double, 2> lengths,
                       std::array<int, 2> modes, std::array<int, 2> grid) {
  if (dim != 1 && dim != 2)
    throw ConfigError("domain.dim must be 1 or 2, got " + std::to_string(dim));
  if (dim == 1) {
    lengths[1] = 1.0;
    modes[1] = 1;
    grid[1] = 1;
  }
  for (int a = 0; a < dim; ++a) {
    const std::string axis = "domain axis " + std::to_string(a);
    if (!(lengths[a] > 0.0))
      throw ConfigError(axis + ": length must be positive");
    if (modes[a] < 1) throw ConfigError(axis + ": need at least one mode");
    if (grid[a] < modes[a])
      throw ConfigError(axis + ": grid size " + std::to_string(grid[a]) +
                        " is below the mode count " + std::to_string(modes[a]) +
                        "; quadrature would alias");
  }

  Domain d;
  d.dim_ = dim;
  d.length_ = lengths;
  d.n_ = modes;
  d.N_ = grid;
  d.weight_ = (lengths[0] / grid[0]) * (lengths[1] / grid[1]);
  for (int a = 0; a < 2; ++a)
    fill_axis_tables(lengths[a], modes[a], grid[a], d.basis_[a], d.dbasis_[a],
                     d.mu_[a]);
  return DomainPtr(new Domain(std::move(d)));
}

DomainPtr Domain::make_1d(double length, int modes, int grid) {
  return make(1, {length, 1.0}, {modes, 1}, {grid, 1});
}

DomainPtr Domain::make_2d(double lx, double ly, int modes_per_axis,
                          int grid_per_axis) {
  return make(2, {lx, ly}, {modes_per_axis, modes_per_axis},
              {grid_per_axis, grid_per_axis});
}

double Domain::max_eigenvalue() const {
  return mu_[0][n_[0] - 1] + mu_[1][n_[1] - 1];
}

bool Domain::same_modes(const Domain& other) const {
  return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
}

}  // namespace sllg
