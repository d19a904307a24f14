#include "sllg/llg.hpp"

#include <cmath>

#include "sllg/errors.hpp"
#include "sllg/spectral.hpp"

namespace sllg {

PhysParams PhysParams::make(double l1, double l2, double l3) {
  if (!std::isfinite(l1) || !std::isfinite(l2) || !std::isfinite(l3))
    throw ConfigError("physics.lambda: all coefficients must be finite");
  if (!(l2 > 0.0))
    throw ConfigError("physics.lambda2: damping must be positive");
  return PhysParams{l1, l2, l3};
}

PhysParams PhysParams::make_unchecked(double l1, double l2, double l3) {
  return PhysParams{l1, l2, l3};
}

SpectralField f1(const SpectralField& u) {
  const GridField ug = synthesize(u);
  const GridField lap = synthesize(laplacian(u));
  return analyze(cross(ug, lap));
}

SpectralField f2(const SpectralField& u) {
  const GridField ug = synthesize(u);
  const GridField lap = synthesize(laplacian(u));
  return analyze(cross(ug, cross(ug, lap)));
}

SpectralField g_op(const SpectralField& u, const GridField& h) {
  return analyze(cross(synthesize(u), h));
}

SpectralField noise_double_cross(const SpectralField& u, const GridField& h) {
  return analyze(cross(synthesize(g_op(u, h)), h));
}

SpectralField ito_correction(const SpectralField& u, const GridField& h,
                             double lambda3) {
  SpectralField out = noise_double_cross(u, h);
  scale(out, 0.5 * lambda3 * lambda3);
  return out;
}

SpectralField drift_stratonovich(const SpectralField& u, const GridField& h,
                                 const PhysParams& p) {
  SpectralField out = SpectralField::zeros(u.dom);
  LlgScratch s;
  drift_stratonovich_into(u, h, p, out, s);
  return out;
}

SpectralField drift_ito(const SpectralField& u, const GridField& h,
                        const PhysParams& p) {
  SpectralField out = drift_stratonovich(u, h, p);
  axpy(1.0, ito_correction(u, h, p.lambda3), out);
  return out;
}

void drift_stratonovich_into(const SpectralField& u, const GridField& h,
                             const PhysParams& p, SpectralField& out,
                             LlgScratch& s) {
  (void)h;
  synthesize_into(u, s.ug, s.ws);
  laplacian_into(u, s.cs);
  synthesize_into(s.cs, s.lap_g, s.ws);
  cross_into(s.ug, s.lap_g, s.t1);       // u x Lap u
  cross_into(s.ug, s.t1, s.t2);          // u x (u x Lap u)
  for (size_t i = 0; i < s.t1.v.size(); ++i)
    s.t1.v[i] = p.lambda1 * s.t1.v[i] - p.lambda2 * s.t2.v[i];
  analyze_into(s.t1, out, s.ws);
}

void g_into(const SpectralField& u, const GridField& h, SpectralField& out,
            LlgScratch& s) {
  synthesize_into(u, s.ug, s.ws);
  cross_into(s.ug, h, s.t1);
  analyze_into(s.t1, out, s.ws);
}

}  // namespace sllg
