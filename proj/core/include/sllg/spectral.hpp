#pragma once

#include "sllg/field.hpp"

namespace sllg {

// analyze: quadrature projection onto the retained modes,
//   c_k = w sum_j e_k(x_j) f(x_j).
// Exact L2 projection whenever the sampled function is a cosine
// polynomial of per-axis degree < 2N - n + 1; in particular exact on
// band-limited data for any N >= n.  synthesize is its exact adjoint
// (up to the quadrature weight), so synthesize(analyze(.)) is the
// identity on band-limited fields.
SpectralField analyze(const GridField& g);
GridField synthesize(const SpectralField& f);

// Workspace-reusing variants; ws is resized as needed.
void analyze_into(const GridField& g, SpectralField& out,
                  std::vector<double>& ws);
void synthesize_into(const SpectralField& f, GridField& out,
                     std::vector<double>& ws);

// Pointwise values of the axis derivative of the represented field.
GridField synthesize_deriv(const SpectralField& f, int axis);
void synthesize_deriv_into(const SpectralField& f, int axis, GridField& out,
                           std::vector<double>& ws);

// c_k -> -mu_k c_k.
SpectralField laplacian(const SpectralField& f);
void laplacian_into(const SpectralField& f, SpectralField& out);

// Zero every mode with any axis index >= m (box truncation).
SpectralField truncate(const SpectralField& f, int m);

// Reinterpret the coefficients on a domain with the same mode set but a
// different collocation resolution (used to evaluate diagnostics on
// finer quadrature grids).
SpectralField regrid(const SpectralField& f, DomainPtr target);

double l2_norm(const SpectralField& f);       // sqrt(sum c^2)
double h1_seminorm(const SpectralField& f);   // sqrt(sum mu c^2) = |grad u|_{L2}
double dual_h1_norm(const SpectralField& f);  // sqrt(sum c^2 / (1 + mu))
double h1_inner(const SpectralField& a, const SpectralField& b);

// Quadrature L2 pairing of grid fields: w sum_j <a_j, b_j>.
double grid_inner(const GridField& a, const GridField& b);

// Quadrature Lp norm of |f(x_j)| (Euclidean on the 3 components).
// Supported exponents: 1, 6/5, 3/2, 2, 6 and infinity.
double lp_norm(const GridField& g, double p);

}  // namespace sllg
