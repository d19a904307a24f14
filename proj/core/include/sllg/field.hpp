#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sllg/domain.hpp"

namespace sllg {

// 3-vector field in the cosine basis; coefficient layout c[flat * 3 + comp].
struct SpectralField {
  DomainPtr dom;
  std::vector<double> c;

  static SpectralField zeros(DomainPtr d);
  double& at(long flat, int comp) { return c[flat * 3 + comp]; }
  double at(long flat, int comp) const { return c[flat * 3 + comp]; }
};

// 3-vector field sampled on the collocation grid; layout v[j * 3 + comp].
struct GridField {
  DomainPtr dom;
  std::vector<double> v;

  static GridField zeros(DomainPtr d);
  double& at(long j, int comp) { return v[j * 3 + comp]; }
  double at(long j, int comp) const { return v[j * 3 + comp]; }
};

// y += a * x; fields must live on domains with the same mode set.
void axpy(double a, const SpectralField& x, SpectralField& y);
void scale(SpectralField& x, double a);

// Euclidean dot of the coefficient vectors.  By Parseval this is the
// L2 inner product of the represented fields.
double coeff_dot(const SpectralField& a, const SpectralField& b);

// out = a x b pointwise; aliasing with either input is fine.
void cross_into(const GridField& a, const GridField& b, GridField& out);
GridField cross(const GridField& a, const GridField& b);

// Sample f(x0, x1) at the collocation points.  1-D domains pass the dummy
// axis coordinate 0.5 as x1.
GridField sample_function(
    DomainPtr d, const std::function<std::array<double, 3>(double, double)>& f);

}  // namespace sllg
