#include "sllg/field.hpp"

#include <cassert>

namespace sllg {

SpectralField SpectralField::zeros(DomainPtr d) {
  SpectralField f;
  f.dom = std::move(d);
  f.c.assign(static_cast<size_t>(f.dom->num_modes()) * 3, 0.0);
  return f;
}

GridField GridField::zeros(DomainPtr d) {
  GridField g;
  g.dom = std::move(d);
  g.v.assign(static_cast<size_t>(g.dom->num_grid()) * 3, 0.0);
  return g;
}

void axpy(double a, const SpectralField& x, SpectralField& y) {
  assert(x.c.size() == y.c.size());
  for (size_t i = 0; i < x.c.size(); ++i) y.c[i] += a * x.c[i];
}

void scale(SpectralField& x, double a) {
  for (double& v : x.c) v *= a;
}

double coeff_dot(const SpectralField& a, const SpectralField& b) {
  assert(a.c.size() == b.c.size());
  double s = 0;
  for (size_t i = 0; i < a.c.size(); ++i) s += a.c[i] * b.c[i];
  return s;
}

void cross_into(const GridField& a, const GridField& b, GridField& out) {
  assert(a.v.size() == b.v.size());
  if (out.v.size() != a.v.size()) {
    out.dom = a.dom;
    out.v.resize(a.v.size());
  }
  const long m = static_cast<long>(a.v.size()) / 3;
  for (long j = 0; j < m; ++j) {
    const double ax = a.v[j * 3], ay = a.v[j * 3 + 1], az = a.v[j * 3 + 2];
    const double bx = b.v[j * 3], by = b.v[j * 3 + 1], bz = b.v[j * 3 + 2];
    out.v[j * 3] = ay * bz - az * by;
    out.v[j * 3 + 1] = az * bx - ax * bz;
    out.v[j * 3 + 2] = ax * by - ay * bx;
  }
}

GridField cross(const GridField& a, const GridField& b) {
  GridField out = GridField::zeros(a.dom);
  cross_into(a, b, out);
  return out;
}

GridField sample_function(
    DomainPtr d, const std::function<std::array<double, 3>(double, double)>& f) {
  GridField g = GridField::zeros(d);
  const int N0 = d->grid(0), N1 = d->grid(1);
  for (int j0 = 0; j0 < N0; ++j0) {
    const double x0 = d->grid_coord(0, j0);
    for (int j1 = 0; j1 < N1; ++j1) {
      const double x1 = d->grid_coord(1, j1);
      const auto val = f(x0, x1);
      const long j = d->grid_index(j0, j1);
      g.v[j * 3] = val[0];
      g.v[j * 3 + 1] = val[1];
      g.v[j * 3 + 2] = val[2];
    }
  }
  return g;
}

}  // namespace sllg
