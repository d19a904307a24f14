#pragma once

#include "sllg/field.hpp"

namespace sllg {

struct PhysParams {
  double lambda1 = 0;  // precession
  double lambda2 = 0;  // damping, must be > 0
  double lambda3 = 0;  // noise amplitude

  static PhysParams make(double l1, double l2, double l3);
  // Skips the lambda2 > 0 check; only the zero-damping escape hatch in
  // the CLI should use this.
  static PhysParams make_unchecked(double l1, double l2, double l3);
};

// The projected vector fields of the mode-truncated equation.  All of
// them return coefficients on u's own domain; callers pick the
// collocation resolution by regridding first.

// f1 = pi_n(u x Lap u)
SpectralField f1(const SpectralField& u);
// f2 = pi_n(u x (u x Lap u))
SpectralField f2(const SpectralField& u);
// g = pi_n(u x h)
SpectralField g_op(const SpectralField& u, const GridField& h);
// pi_n((pi_n(u x h)) x h).  The inner projection is part of the model:
// the noise map acts on the truncated space.
SpectralField noise_double_cross(const SpectralField& u, const GridField& h);
// (lambda3^2 / 2) pi_n((pi_n(u x h)) x h): the Ito drift correction
// matching Stratonovich noise of amplitude lambda3.
SpectralField ito_correction(const SpectralField& u, const GridField& h,
                             double lambda3);

// lambda1 f1 - lambda2 f2
SpectralField drift_stratonovich(const SpectralField& u, const GridField& h,
                                 const PhysParams& p);
// drift_stratonovich + ito_correction
SpectralField drift_ito(const SpectralField& u, const GridField& h,
                        const PhysParams& p);

// Scratch buffers for the hot path; contents are transient.
struct LlgScratch {
  GridField ug, lap_g, t1, t2;
  SpectralField cs;
  std::vector<double> ws;
};

void drift_stratonovich_into(const SpectralField& u, const GridField& h,
                             const PhysParams& p, SpectralField& out,
                             LlgScratch& s);
void g_into(const SpectralField& u, const GridField& h, SpectralField& out,
            LlgScratch& s);

}  // namespace sllg
