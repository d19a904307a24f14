#include "sllg/spectral.hpp"

#include <cmath>
#include <cstring>

#include "sllg/errors.hpp"

namespace sllg {

namespace {

// Contraction along axis 1 then axis 0.  The intermediate tensor has
// shape [N0, n1, 3] for analyze and [N0, n1, 3] for synthesize as well,
// so one workspace serves both directions.
void contract_axis1_grid_to_modes(const Domain& d, const double* g,
                                  double* t) {
  const int N0 = d.grid(0), N1 = d.grid(1), n1 = d.modes(1);
  const std::vector<double>& b1 = d.basis(1);
  for (int j0 = 0; j0 < N0; ++j0) {
    const double* row = g + static_cast<size_t>(j0) * N1 * 3;
    double* out = t + static_cast<size_t>(j0) * n1 * 3;
    for (int k1 = 0; k1 < n1; ++k1) {
      const double* b = b1.data() + static_cast<size_t>(k1) * N1;
      double s0 = 0, s1 = 0, s2 = 0;
      for (int j1 = 0; j1 < N1; ++j1) {
        const double w = b[j1];
        s0 += w * row[j1 * 3];
        s1 += w * row[j1 * 3 + 1];
        s2 += w * row[j1 * 3 + 2];
      }
      out[k1 * 3] = s0;
      out[k1 * 3 + 1] = s1;
      out[k1 * 3 + 2] = s2;
    }
  }
}

}  // namespace

void analyze_into(const GridField& g, SpectralField& out,
                  std::vector<double>& ws) {
  const Domain& d = *g.dom;
  const int N0 = d.grid(0), n0 = d.modes(0), n1 = d.modes(1);
  if (out.c.size() != static_cast<size_t>(d.num_modes()) * 3) {
    out.dom = g.dom;
    out.c.resize(static_cast<size_t>(d.num_modes()) * 3);
  }
  ws.resize(static_cast<size_t>(N0) * n1 * 3);
  contract_axis1_grid_to_modes(d, g.v.data(), ws.data());

  double w = d.cell_weight();
#ifdef SLLG_TRANSFORM_NORMALIZATION_BUG
  // Deliberate mis-normalization; the verification battery must catch it.
  w *= 1.0 + 1e-3;
#endif
  const std::vector<double>& b0 = d.basis(0);
  const size_t block = static_cast<size_t>(n1) * 3;
  std::memset(out.c.data(), 0, out.c.size() * sizeof(double));
  for (int k0 = 0; k0 < n0; ++k0) {
    double* dst = out.c.data() + k0 * block;
    for (int j0 = 0; j0 < N0; ++j0) {
      const double bw = w * b0[static_cast<size_t>(k0) * N0 + j0];
      const double* src = ws.data() + j0 * block;
      for (size_t i = 0; i < block; ++i) dst[i] += bw * src[i];
    }
  }
}

SpectralField analyze(const GridField& g) {
  SpectralField out = SpectralField::zeros(g.dom);
  std::vector<double> ws;
  analyze_into(g, out, ws);
  return out;
}

namespace {

void synthesize_with_tables(const SpectralField& f,
                            const std::vector<double>& b0,
                            const std::vector<double>& b1, GridField& out,
                            std::vector<double>& ws) {
  const Domain& d = *f.dom;
  const int N0 = d.grid(0), N1 = d.grid(1), n0 = d.modes(0), n1 = d.modes(1);
  if (out.v.size() != static_cast<size_t>(d.num_grid()) * 3) {
    out.dom = f.dom;
    out.v.resize(static_cast<size_t>(d.num_grid()) * 3);
  }
  const size_t block = static_cast<size_t>(n1) * 3;
  ws.assign(static_cast<size_t>(N0) * block, 0.0);
  for (int k0 = 0; k0 < n0; ++k0) {
    const double* src = f.c.data() + k0 * block;
    for (int j0 = 0; j0 < N0; ++j0) {
      const double bw = b0[static_cast<size_t>(k0) * N0 + j0];
      double* dst = ws.data() + j0 * block;
      for (size_t i = 0; i < block; ++i) dst[i] += bw * src[i];
    }
  }
  std::memset(out.v.data(), 0, out.v.size() * sizeof(double));
  for (int j0 = 0; j0 < N0; ++j0) {
    const double* s = ws.data() + j0 * block;
    double* row = out.v.data() + static_cast<size_t>(j0) * N1 * 3;
    for (int k1 = 0; k1 < n1; ++k1) {
      const double* b = b1.data() + static_cast<size_t>(k1) * N1;
      const double c0 = s[k1 * 3], c1 = s[k1 * 3 + 1], c2 = s[k1 * 3 + 2];
      for (int j1 = 0; j1 < N1; ++j1) {
        row[j1 * 3] += b[j1] * c0;
        row[j1 * 3 + 1] += b[j1] * c1;
        row[j1 * 3 + 2] += b[j1] * c2;
      }
    }
  }
}

}  // namespace

void synthesize_into(const SpectralField& f, GridField& out,
                     std::vector<double>& ws) {
  synthesize_with_tables(f, f.dom->basis(0), f.dom->basis(1), out, ws);
}

GridField synthesize(const SpectralField& f) {
  GridField out = GridField::zeros(f.dom);
  std::vector<double> ws;
  synthesize_into(f, out, ws);
  return out;
}

void synthesize_deriv_into(const SpectralField& f, int axis, GridField& out,
                           std::vector<double>& ws) {
  const Domain& d = *f.dom;
  synthesize_with_tables(f, axis == 0 ? d.basis_deriv(0) : d.basis(0),
                         axis == 1 ? d.basis_deriv(1) : d.basis(1), out, ws);
}

GridField synthesize_deriv(const SpectralField& f, int axis) {
  GridField out = GridField::zeros(f.dom);
  std::vector<double> ws;
  synthesize_deriv_into(f, axis, out, ws);
  return out;
}

void laplacian_into(const SpectralField& f, SpectralField& out) {
  if (out.c.size() != f.c.size()) {
    out.dom = f.dom;
    out.c.resize(f.c.size());
  }
  const long m = f.dom->num_modes();
  for (long k = 0; k < m; ++k) {
    const double mu = f.dom->eigenvalue(k);
    out.c[k * 3] = -mu * f.c[k * 3];
    out.c[k * 3 + 1] = -mu * f.c[k * 3 + 1];
    out.c[k * 3 + 2] = -mu * f.c[k * 3 + 2];
  }
}

SpectralField laplacian(const SpectralField& f) {
  SpectralField out = SpectralField::zeros(f.dom);
  laplacian_into(f, out);
  return out;
}

SpectralField truncate(const SpectralField& f, int m) {
  SpectralField out = f;
  const int n1 = f.dom->modes(1);
  for (long k = 0; k < f.dom->num_modes(); ++k) {
    const int k0 = static_cast<int>(k / n1), k1 = static_cast<int>(k % n1);
    if (k0 >= m || k1 >= m) {
      out.c[k * 3] = 0;
      out.c[k * 3 + 1] = 0;
      out.c[k * 3 + 2] = 0;
    }
  }
  return out;
}

SpectralField regrid(const SpectralField& f, DomainPtr target) {
  if (!f.dom->same_modes(*target))
    throw DataError("regrid: target domain has a different mode set");
  SpectralField out;
  out.dom = std::move(target);
  out.c = f.c;
  return out;
}

double l2_norm(const SpectralField& f) { return std::sqrt(coeff_dot(f, f)); }

double h1_inner(const SpectralField& a, const SpectralField& b) {
  double s = 0;
  const long m = a.dom->num_modes();
  for (long k = 0; k < m; ++k) {
    const double mu = a.dom->eigenvalue(k);
    s += mu * (a.c[k * 3] * b.c[k * 3] + a.c[k * 3 + 1] * b.c[k * 3 + 1] +
               a.c[k * 3 + 2] * b.c[k * 3 + 2]);
  }
  return s;
}

double h1_seminorm(const SpectralField& f) {
  return std::sqrt(h1_inner(f, f));
}

double dual_h1_norm(const SpectralField& f) {
  double s = 0;
  const long m = f.dom->num_modes();
  for (long k = 0; k < m; ++k) {
    const double w = 1.0 / (1.0 + f.dom->eigenvalue(k));
    s += w * (f.c[k * 3] * f.c[k * 3] + f.c[k * 3 + 1] * f.c[k * 3 + 1] +
              f.c[k * 3 + 2] * f.c[k * 3 + 2]);
  }
  return std::sqrt(s);
}

double grid_inner(const GridField& a, const GridField& b) {
  double s = 0;
  for (size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
  return a.dom->cell_weight() * s;
}

double lp_norm(const GridField& g, double p) {
  const long m = g.dom->num_grid();
  if (std::isinf(p)) {
    double best = 0;
    for (long j = 0; j < m; ++j) {
      const double v = g.v[j * 3] * g.v[j * 3] + g.v[j * 3 + 1] * g.v[j * 3 + 1] +
                       g.v[j * 3 + 2] * g.v[j * 3 + 2];
      if (v > best) best = v;
    }
    return std::sqrt(best);
  }
  if (!(p == 1.0 || p == 1.2 || p == 1.5 || p == 2.0 || p == 6.0))
    throw ConfigError("lp_norm: unsupported exponent " + std::to_string(p));
  double s = 0;
  for (long j = 0; j < m; ++j) {
    const double v = std::sqrt(g.v[j * 3] * g.v[j * 3] +
                               g.v[j * 3 + 1] * g.v[j * 3 + 1] +
                               g.v[j * 3 + 2] * g.v[j * 3 + 2]);
    s += std::pow(v, p);
  }
  return std::pow(g.dom->cell_weight() * s, 1.0 / p);
}

}  // namespace sllg
