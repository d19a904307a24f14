#pragma once

#include <cstdint>
#include <vector>

#include "sllg/brownian.hpp"
#include "sllg/field.hpp"
#include "sllg/llg.hpp"

namespace sllg {

enum class Scheme { heun, midpoint };

struct SchemeConfig {
  double midpoint_tol = 1e-12;  // relative coefficient change per sweep
  int midpoint_max_iter = 50;
};

// Explicit stochastic Heun step (Stratonovich predictor-corrector):
//   ubar = u + dt F(u) + l3 dW g(u)
//   u+   = u + dt/2 (F(u) + F(ubar)) + l3 dW/2 (g(u) + g(ubar)).
// Stable only while dt * lambda2 * mu_max stays below about 2.
SpectralField step_heun(const SpectralField& u, const GridField& h,
                        const PhysParams& p, double dt, double dW);

// Implicit midpoint step: u+ = u + dt F(m) + l3 dW g(m), m = (u + u+)/2.
// <F(m), m> = <g(m), m> = 0 exactly (pointwise perpendicularity survives
// the projection), so |u|_{L2} is conserved to solver tolerance.  The
// midpoint equation is solved by a modified Newton iteration with an
// exactly assembled Jacobian; plain fixed-point sweeps diverge once
// dt * lambda2 * mu_max is order one.  Falls back to a Heun predictor
// as initial guess when the first rounds stall.  Throws
// IntegrationError if the solve does not converge.
SpectralField step_midpoint(const SpectralField& u, const GridField& h,
                            const PhysParams& p, double dt, double dW,
                            const SchemeConfig& sc = {});

// Per-step scalars; pairings that the balance diagnostics integrate.
struct Observables {
  double t = 0;
  double l2 = 0;            // |u|_{L2}
  double h1 = 0;            // |grad u|_{L2}
  double energy = 0;        // h1^2 / 2
  double cross_sq = 0;      // int |u x Lap u|^2
  double triple_65 = 0;     // |u x (u x Lap u)|_{L^{6/5}}
  double sphere = 0;        // int (|u|^2 - 1)^2
  double strat_pair = 0;    // <grad u, grad pi_n(u x h)>
  double noise_grad_sq = 0; // |grad pi_n(u x h)|^2
  double corr_pair = 0;     // <grad u, grad pi_n((pi_n(u x h)) x h)>
};

Observables compute_observables(const SpectralField& u, const GridField& h,
                                double t);

struct RecordingPolicy {
  enum class Mode { every_step, stride, observables_only };
  Mode mode = Mode::every_step;
  int stride = 1;
};

// One realization.  Observables are recorded at every step regardless of
// the snapshot policy; snapshots always include the first and last state.
struct Trajectory {
  DomainPtr dom;
  double dt = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<double> dW;
  std::vector<Observables> obs;      // steps + 1 rows
  std::vector<SpectralField> snaps;
  std::vector<long> snap_steps;

  const SpectralField& initial_state() const { return snaps.front(); }
  const SpectralField& final_state() const { return snaps.back(); }
  double time_of_step(long k) const { return dt * k; }
};

// Drive u0 along the given increments.  Throws IntegrationError with the
// failing step and time if a step cannot be completed.
Trajectory integrate(const SpectralField& u0, const GridField& h,
                     const PhysParams& p, Scheme scheme,
                     const SchemeConfig& sc, const BrownianPath& path,
                     const RecordingPolicy& rec = {});

}  // namespace sllg
