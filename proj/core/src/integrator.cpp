#include "sllg/integrator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "linalg.hpp"
#include "sllg/errors.hpp"
#include "sllg/spectral.hpp"

namespace sllg {

namespace {

// Thread-local stepping context: every buffer the two schemes and the
// midpoint Newton solve need, allocated once per (domain, thread).
struct Stepper {
  LlgScratch s;
  SpectralField F0, G0, F1, G1, ubar, m, lapm_c, colc;
  GridField mg, lapmg, mxlap, colg;
  std::vector<double> jac, rhs, basisb, ws;
  detail::LuFactors lu;
};

void eval_drift_and_g(const SpectralField& u, const GridField& h,
                      const PhysParams& p, SpectralField& F, SpectralField& G,
                      LlgScratch& s) {
  drift_stratonovich_into(u, h, p, F, s);
  // s.ug still holds synthesize(u)
  cross_into(s.ug, h, s.t2);
  analyze_into(s.t2, G, s.ws);
}

void heun_into(const SpectralField& u, const GridField& h, const PhysParams& p,
               double dt, double dW, Stepper& st, SpectralField& out) {
  const double a = p.lambda3 * dW;
  eval_drift_and_g(u, h, p, st.F0, st.G0, st.s);
  if (st.ubar.c.size() != u.c.size()) {
    st.ubar.dom = u.dom;
    st.ubar.c.resize(u.c.size());
  }
  for (size_t i = 0; i < u.c.size(); ++i)
    st.ubar.c[i] = u.c[i] + dt * st.F0.c[i] + a * st.G0.c[i];
  eval_drift_and_g(st.ubar, h, p, st.F1, st.G1, st.s);
  if (out.c.size() != u.c.size()) {
    out.dom = u.dom;
    out.c.resize(u.c.size());
  }
  for (size_t i = 0; i < u.c.size(); ++i)
    out.c[i] = u.c[i] + 0.5 * dt * (st.F0.c[i] + st.F1.c[i]) +
               0.5 * a * (st.G0.c[i] + st.G1.c[i]);
}

// (e_c x A) has component (c+1)%3 equal to -A[(c+2)%3] and component
// (c+2)%3 equal to +A[(c+1)%3]; component c vanishes.
inline void unit_cross(int c, const double* a, double* out) {
  const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
  out[c] = 0;
  out[c1] = -a[c2];
  out[c2] = a[c1];
}

inline void cross3(const double* a, const double* b, double* out) {
  out[0] = a[1] * b[2] - a[2] * b[1];
  out[1] = a[2] * b[0] - a[0] * b[2];
  out[2] = a[0] * b[1] - a[1] * b[0];
}

// J = I - hdt DF(m) - hdw Dg(m), assembled column by column.  A column
// direction is one basis function in one component; its grid values are
// an outer product of the per-axis tables, so no transform is needed on
// the way in, only the projection of the result.
void assemble_jacobian(const SpectralField& m, const GridField& h,
                       const PhysParams& p, double hdt, double hdw,
                       Stepper& st) {
  const Domain& d = *m.dom;
  const long M = d.num_modes();
  const int dim = static_cast<int>(3 * M);
  const long NG = d.num_grid();
  const int N0 = d.grid(0), N1 = d.grid(1), n1 = d.modes(1);

  synthesize_into(m, st.mg, st.ws);
  laplacian_into(m, st.lapm_c);
  synthesize_into(st.lapm_c, st.lapmg, st.ws);
  cross_into(st.mg, st.lapmg, st.mxlap);

  st.jac.assign(static_cast<size_t>(dim) * dim, 0.0);
  st.basisb.resize(NG);
  if (st.colg.v.size() != static_cast<size_t>(NG) * 3) {
    st.colg.dom = m.dom;
    st.colg.v.resize(static_cast<size_t>(NG) * 3);
  }

  for (long flat = 0; flat < M; ++flat) {
    const int k0 = static_cast<int>(flat / n1);
    const int k1 = static_cast<int>(flat % n1);
    const double mu = d.eigenvalue(flat);
    const double* b0 = d.basis(0).data() + static_cast<size_t>(k0) * N0;
    const double* b1 = d.basis(1).data() + static_cast<size_t>(k1) * N1;
    for (int j0 = 0; j0 < N0; ++j0)
      for (int j1 = 0; j1 < N1; ++j1)
        st.basisb[static_cast<size_t>(j0) * N1 + j1] = b0[j0] * b1[j1];

    for (int c = 0; c < 3; ++c) {
      const int col = static_cast<int>(flat * 3 + c);
      for (long j = 0; j < NG; ++j) {
        const double b = st.basisb[j];
        const double* mj = st.mg.v.data() + j * 3;
        const double* lj = st.lapmg.v.data() + j * 3;
        const double* xj = st.mxlap.v.data() + j * 3;
        const double* hj = h.v.data() + j * 3;
        double ecl[3], ecm[3], ecx[3], ech[3], q2[3], q3[3];
        unit_cross(c, lj, ecl);   // e_c x Lap m
        unit_cross(c, mj, ecm);   // e_c x m
        unit_cross(c, xj, ecx);   // e_c x (m x Lap m)
        unit_cross(c, hj, ech);   // e_c x h
        cross3(mj, ecl, q2);      // m x (e_c x Lap m)
        cross3(mj, ecm, q3);      // m x (e_c x m) = -m x (m x e_c)
        double* out = st.colg.v.data() + j * 3;
        for (int a = 0; a < 3; ++a) {
          const double P = ecl[a] + mu * ecm[a];
          const double Q = ecx[a] + q2[a] + mu * q3[a];
          out[a] = b * (hdt * (p.lambda1 * P - p.lambda2 * Q) + hdw * ech[a]);
        }
      }
      analyze_into(st.colg, st.colc, st.ws);
      for (int r = 0; r < dim; ++r)
        st.jac[static_cast<size_t>(r) * dim + col] =
            (r == col ? 1.0 : 0.0) - st.colc.c[r];
    }
  }
  if (!st.lu.factor(st.jac, dim))
    throw IntegrationError("midpoint Jacobian is singular", -1,
                           std::numeric_limits<double>::quiet_NaN());
}

// Solve m = u + hdt F(m) + hdw g(m) for the midpoint state m.  Modified
// Newton: one Jacobian per step, refreshed once (together with a Heun
// predictor as new initial guess) if the first half of the iteration
// budget is spent without converging.  Returns iterations used, or -1.
int solve_midpoint(const SpectralField& u, const GridField& h,
                   const PhysParams& p, double dt, double dW,
                   const SchemeConfig& sc, Stepper& st) {
  const double hdt = 0.5 * dt;
  const double hdw = 0.5 * p.lambda3 * dW;
  const int dim = static_cast<int>(u.c.size());

  st.m = u;
  assemble_jacobian(st.m, h, p, hdt, hdw, st);
  bool refreshed = false;
  st.rhs.resize(dim);
  for (int iter = 1; iter <= sc.midpoint_max_iter; ++iter) {
    eval_drift_and_g(st.m, h, p, st.F0, st.G0, st.s);
    for (int i = 0; i < dim; ++i)
      st.rhs[i] = st.m.c[i] - u.c[i] - hdt * st.F0.c[i] - hdw * st.G0.c[i];
    st.lu.solve(st.rhs);
    double dn = 0, mn = 0;
    for (int i = 0; i < dim; ++i) {
      st.m.c[i] -= st.rhs[i];
      dn += st.rhs[i] * st.rhs[i];
      mn += st.m.c[i] * st.m.c[i];
    }
    if (!std::isfinite(dn)) return -1;
    if (std::sqrt(dn) <= sc.midpoint_tol * std::max(1.0, std::sqrt(mn)))
      return iter;
    if (!refreshed && iter >= sc.midpoint_max_iter / 2) {
      heun_into(u, h, p, dt, dW, st, st.ubar);
      for (int i = 0; i < dim; ++i)
        st.m.c[i] = 0.5 * (u.c[i] + st.ubar.c[i]);
      assemble_jacobian(st.m, h, p, hdt, hdw, st);
      refreshed = true;
    }
  }
  return -1;
}

void midpoint_into(const SpectralField& u, const GridField& h,
                   const PhysParams& p, double dt, double dW,
                   const SchemeConfig& sc, Stepper& st, SpectralField& out,
                   long step, double t) {
  if (solve_midpoint(u, h, p, dt, dW, sc, st) < 0)
    throw IntegrationError("midpoint solve did not converge within " +
                               std::to_string(sc.midpoint_max_iter) +
                               " iterations",
                           step, t);
  if (out.c.size() != u.c.size()) {
    out.dom = u.dom;
    out.c.resize(u.c.size());
  }
  for (size_t i = 0; i < u.c.size(); ++i) out.c[i] = 2.0 * st.m.c[i] - u.c[i];
}

bool finite(const SpectralField& f) {
  for (double v : f.c)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

SpectralField step_heun(const SpectralField& u, const GridField& h,
                        const PhysParams& p, double dt, double dW) {
  Stepper st;
  SpectralField out = SpectralField::zeros(u.dom);
  heun_into(u, h, p, dt, dW, st, out);
  return out;
}

SpectralField step_midpoint(const SpectralField& u, const GridField& h,
                            const PhysParams& p, double dt, double dW,
                            const SchemeConfig& sc) {
  Stepper st;
  SpectralField out = SpectralField::zeros(u.dom);
  midpoint_into(u, h, p, dt, dW, sc, st, out, -1,
                std::numeric_limits<double>::quiet_NaN());
  return out;
}

Observables compute_observables(const SpectralField& u, const GridField& h,
                                double t) {
  Observables o;
  o.t = t;
  o.l2 = l2_norm(u);
  const double h1sq = h1_inner(u, u);
  o.h1 = std::sqrt(h1sq);
  o.energy = 0.5 * h1sq;

  const GridField ug = synthesize(u);
  const GridField lapg = synthesize(laplacian(u));
  const GridField cr = cross(ug, lapg);
  o.cross_sq = grid_inner(cr, cr);
  o.triple_65 = lp_norm(cross(ug, cr), 1.2);

  double sph = 0;
  const long NG = u.dom->num_grid();
  for (long j = 0; j < NG; ++j) {
    const double r2 = ug.v[j * 3] * ug.v[j * 3] +
                      ug.v[j * 3 + 1] * ug.v[j * 3 + 1] +
                      ug.v[j * 3 + 2] * ug.v[j * 3 + 2];
    sph += (r2 - 1.0) * (r2 - 1.0);
  }
  o.sphere = u.dom->cell_weight() * sph;

  const SpectralField gs = analyze(cross(ug, h));
  o.strat_pair = h1_inner(u, gs);
  o.noise_grad_sq = h1_inner(gs, gs);
  const SpectralField dc = analyze(cross(synthesize(gs), h));
  o.corr_pair = h1_inner(u, dc);
  return o;
}

Trajectory integrate(const SpectralField& u0, const GridField& h,
                     const PhysParams& p, Scheme scheme,
                     const SchemeConfig& sc, const BrownianPath& path,
                     const RecordingPolicy& rec) {
  if (h.v.size() != static_cast<size_t>(u0.dom->num_grid()) * 3)
    throw DataError("integrate: h is not sampled on the state grid");
  if (!finite(u0)) throw DataError("integrate: initial state is not finite");
  if (rec.mode == RecordingPolicy::Mode::stride && rec.stride < 1)
    throw ConfigError("recording.stride must be >= 1");

  const long steps = path.steps();
  const long stride = rec.mode == RecordingPolicy::Mode::every_step ? 1
                      : rec.mode == RecordingPolicy::Mode::stride
                          ? rec.stride
                          : std::max<long>(steps, 1);

  Trajectory traj;
  traj.dom = u0.dom;
  traj.dt = path.dt;
  traj.seed = path.seed;
  traj.dW = path.dW;
  traj.obs.reserve(steps + 1);
  traj.snaps.reserve(steps / std::max<long>(stride, 1) + 2);

  Stepper st;
  SpectralField u = u0;
  SpectralField next = SpectralField::zeros(u0.dom);
  traj.obs.push_back(compute_observables(u, h, 0.0));
  traj.snaps.push_back(u);
  traj.snap_steps.push_back(0);

  for (long k = 0; k < steps; ++k) {
    const double t = path.dt * k;
    if (scheme == Scheme::heun)
      heun_into(u, h, p, path.dt, path.dW[k], st, next);
    else
      midpoint_into(u, h, p, path.dt, path.dW[k], sc, st, next, k, t);
    if (!finite(next))
      throw IntegrationError("state became non-finite", k, t);
    std::swap(u.c, next.c);
    traj.obs.push_back(compute_observables(u, h, path.dt * (k + 1)));
    if ((k + 1) % stride == 0 || k + 1 == steps) {
      traj.snaps.push_back(u);
      traj.snap_steps.push_back(k + 1);
    }
  }
  return traj;
}

}  // namespace sllg
