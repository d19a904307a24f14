#include "sllg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sllg/errors.hpp"
#include "sllg/spectral.hpp"

namespace sllg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool dense_snapshots(const Trajectory& traj) {
  if (traj.snap_steps.size() != traj.dW.size() + 1) return false;
  for (size_t k = 0; k < traj.snap_steps.size(); ++k)
    if (traj.snap_steps[k] != static_cast<long>(k)) return false;
  return true;
}

}  // namespace

Stat mean_se(const std::vector<double>& xs) {
  Stat s;
  const size_t n = xs.size();
  if (n == 0) return {kNaN, kNaN};
  double m = 0;
  for (double x : xs) m += x;
  m /= n;
  double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  s.mean = m;
  s.se = n > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;
  return s;
}

EnergyBalance energy_balance(const Trajectory& traj, const PhysParams& p) {
  const auto& obs = traj.obs;
  if (obs.size() < 2)
    throw DataError("energy_balance: trajectory has no steps");
  const double dt = traj.dt;
  const double l2c = p.lambda2, l3 = p.lambda3;

  EnergyBalance out;
  out.energy_initial = obs.front().energy;
  out.energy_final = obs.back().energy;

  const double slack = 1e-8 * std::max(1.0, obs.front().energy);
  double dissip = 0;      // trapezoid of cross_sq
  double strat_sum = 0;   // midpoint-in-index sum against dW
  double ito_sum = 0;     // left-point sum against dW
  double corr1 = 0, corr2 = 0;
  double sup_s = 0, sup_i = 0;
  for (size_t k = 0; k + 1 < obs.size(); ++k) {
    if (obs[k + 1].energy > obs[k].energy + slack) out.energy_monotone = false;
    dissip += 0.5 * dt * (obs[k].cross_sq + obs[k + 1].cross_sq);
    strat_sum += 0.5 * (obs[k].strat_pair + obs[k + 1].strat_pair) * traj.dW[k];
    ito_sum += obs[k].strat_pair * traj.dW[k];
    corr1 += 0.5 * dt * (obs[k].noise_grad_sq + obs[k + 1].noise_grad_sq);
    corr2 += 0.5 * dt * (obs[k].corr_pair + obs[k + 1].corr_pair);

    const double e = obs[k + 1].energy - obs.front().energy;
    sup_s = std::max(sup_s, std::fabs(e + l2c * dissip - l3 * strat_sum));
    sup_i = std::max(sup_i, std::fabs(e + l2c * dissip - l3 * ito_sum -
                                      0.5 * l3 * l3 * (corr1 + corr2)));
  }

  const double de = out.energy_final - out.energy_initial;
  out.dissipation_integral = dissip;
  out.strat_residual = de + l2c * dissip - l3 * strat_sum;
  out.strat_residual_sup = sup_s;
  out.ito_residual =
      de + l2c * dissip - l3 * ito_sum - 0.5 * l3 * l3 * (corr1 + corr2);
  out.ito_residual_sup = sup_i;
  out.strat_residual_l2sq = de + l2c * l2c * dissip - l3 * strat_sum;
  return out;
}

double sphere_deviation(const SpectralField& u) {
  const GridField ug = synthesize(u);
  double s = 0;
  const long NG = u.dom->num_grid();
  for (long j = 0; j < NG; ++j) {
    const double r2 = ug.v[j * 3] * ug.v[j * 3] +
                      ug.v[j * 3 + 1] * ug.v[j * 3 + 1] +
                      ug.v[j * 3 + 2] * ug.v[j * 3 + 2];
    s += (r2 - 1.0) * (r2 - 1.0);
  }
  return u.dom->cell_weight() * s;
}

double green_identity_check(const SpectralField& u, const SpectralField& v) {
  const Domain& d = *u.dom;
  std::array<int, 2> fine_grid{4 * d.modes(0), 4 * d.modes(1)};
  DomainPtr fine = Domain::make(d.dim(), {d.length(0), d.length(1)},
                                {d.modes(0), d.modes(1)}, fine_grid);
  const SpectralField uf = regrid(u, fine);
  const SpectralField vf = regrid(v, fine);
  double quad = 0;
  for (int a = 0; a < 2; ++a)
    quad += grid_inner(synthesize_deriv(uf, a), synthesize_deriv(vf, a));
  const double spec = h1_inner(u, v);  // = -<Lap u, v>
  return std::fabs(quad - spec) / std::max(1.0, std::fabs(spec));
}

double besov_norm(const Trajectory& traj, double alpha, double q,
                  BesovSpace space, int max_points) {
  const size_t S = traj.snaps.size();
  if (S < 2) throw DataError("besov_norm: need at least two snapshots");
  const int K = static_cast<int>(std::min<size_t>(S, max_points));
  std::vector<size_t> idx(K);
  for (int i = 0; i < K; ++i)
    idx[i] = static_cast<size_t>(
        std::llround(static_cast<double>(i) * (S - 1) / (K - 1)));
  std::vector<double> t(K);
  for (int i = 0; i < K; ++i) t[i] = traj.dt * traj.snap_steps[idx[i]];

  // spatial norm of u_i and of differences
  std::vector<GridField> grids;
  if (space == BesovSpace::grid_l65) {
    grids.reserve(K);
    for (int i = 0; i < K; ++i) grids.push_back(synthesize(traj.snaps[idx[i]]));
  }
  auto norm_of = [&](int i) {
    switch (space) {
      case BesovSpace::grid_l65:
        return lp_norm(grids[i], 1.2);
      case BesovSpace::coeff_l2:
        return l2_norm(traj.snaps[idx[i]]);
      case BesovSpace::dual_h1:
        return dual_h1_norm(traj.snaps[idx[i]]);
    }
    return 0.0;
  };
  auto norm_diff = [&](int i, int j) {
    if (space == BesovSpace::grid_l65) {
      GridField d = grids[i];
      for (size_t m = 0; m < d.v.size(); ++m) d.v[m] -= grids[j].v[m];
      return lp_norm(d, 1.2);
    }
    SpectralField d = traj.snaps[idx[i]];
    for (size_t m = 0; m < d.c.size(); ++m) d.c[m] -= traj.snaps[idx[j]].c[m];
    return space == BesovSpace::coeff_l2 ? l2_norm(d) : dual_h1_norm(d);
  };

  // trapezoid weights on the (possibly uneven) decimated time grid
  std::vector<double> w(K, 0.0);
  for (int i = 0; i + 1 < K; ++i) {
    const double half = 0.5 * (t[i + 1] - t[i]);
    w[i] += half;
    w[i + 1] += half;
  }

  const double band = traj.dt;
  double lq = 0;
  for (int i = 0; i < K; ++i) lq += w[i] * std::pow(norm_of(i), q);
  double semi = 0;
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      const double gap = t[j] - t[i];
      if (gap < band) continue;
      const double nd = std::pow(norm_diff(i, j), q);
      semi += 2.0 * w[i] * w[j] * nd / std::pow(gap, 1.0 + alpha * q);
    }
  }
  return std::pow(lq + semi, 1.0 / q);
}

WeakFormResidual weak_form_residual(const Trajectory& traj,
                                    const BrownianPath& path,
                                    const GridField& h, const PhysParams& p,
                                    const TestFunction& phi) {
  if (!dense_snapshots(traj))
    throw DataError("weak_form_residual: needs every-step snapshots");
  if (traj.dW.size() != path.dW.size())
    throw DataError("weak_form_residual: trajectory and path disagree");

  const Domain& d = *traj.dom;
  // Project the test function on a fine quadrature grid first; pairing
  // the raw function against projected fields leaves a dt-independent
  // truncation floor that would mask the convergence rate.
  const int fine0 = std::max(d.dim() == 1 ? 1024 : 256, 4 * d.grid(0));
  const int fine1 = d.dim() == 1 ? 1 : std::max(256, 4 * d.grid(1));
  DomainPtr fine = Domain::make(d.dim(), {d.length(0), d.length(1)},
                                {d.modes(0), d.modes(1)}, {fine0, fine1});
  const SpectralField phi_c =
      regrid(analyze(sample_function(fine, phi)), traj.dom);
  const GridField phi_g = synthesize(phi_c);
  std::array<GridField, 2> dphi{synthesize_deriv(phi_c, 0),
                                synthesize_deriv(phi_c, 1)};

  const long steps = path.steps();
  std::vector<double> A(steps + 1), B(steps + 1), C(steps + 1);
  for (long k = 0; k <= steps; ++k) {
    const SpectralField& u = traj.snaps[k];
    const GridField ug = synthesize(u);
    double a = 0, b = 0;
    for (int ax = 0; ax < d.dim(); ++ax) {
      const GridField du = synthesize_deriv(u, ax);
      a += grid_inner(du, cross(ug, dphi[ax]));
      // d_ax(u x phi) = du x phi + u x dphi, pointwise product rule
      GridField dc = cross(du, phi_g);
      const GridField t2 = cross(ug, dphi[ax]);
      for (size_t m = 0; m < dc.v.size(); ++m) dc.v[m] += t2.v[m];
      b += grid_inner(du, cross(dc, ug));
    }
    A[k] = a;
    B[k] = b;
    C[k] = coeff_dot(analyze(cross(ug, h)), phi_c);
  }

  const double dt = traj.dt;
  double ia = 0, ib = 0, ic = 0;
  for (long k = 0; k < steps; ++k) {
    ia += 0.5 * dt * (A[k] + A[k + 1]);
    ib += 0.5 * dt * (B[k] + B[k + 1]);
    ic += 0.5 * (C[k] + C[k + 1]) * path.dW[k];
  }

  WeakFormResidual out;
  out.lhs = coeff_dot(traj.snaps[steps], phi_c) -
            coeff_dot(traj.snaps[0], phi_c);
  out.precession_term = p.lambda1 * ia;
  out.damping_term = p.lambda2 * ib;
  out.noise_term = p.lambda3 * ic;
  out.residual =
      std::fabs(out.lhs - out.precession_term + out.damping_term - out.noise_term);
  out.residual_alt =
      std::fabs(out.lhs + out.precession_term + out.damping_term - out.noise_term);
  return out;
}

MartingalePathStats martingale_path_stats(const Trajectory& traj,
                                          const GridField& h,
                                          const PhysParams& p) {
  if (!dense_snapshots(traj))
    throw DataError("martingale_path_stats: needs every-step snapshots");
  if (traj.dom->num_modes() < 2)
    throw DataError("martingale_path_stats: needs at least two modes");

  const long steps = static_cast<long>(traj.dW.size());
  const double dt = traj.dt;
  const size_t dim = traj.snaps[0].c.size();

  LlgScratch s;
  SpectralField F = SpectralField::zeros(traj.dom);
  SpectralField G = SpectralField::zeros(traj.dom);
  SpectralField corr = SpectralField::zeros(traj.dom);
  std::vector<double> step_drift(dim, 0.0);  // Fhat(u_k) dt of the last step
  std::vector<double> drift_acc(dim, 0.0);   // left-point sum so far

  MartingalePathStats out;
  double prev_g2 = 0;
  for (long k = 0; k <= steps; ++k) {
    const SpectralField& u = traj.snaps[k];
    drift_stratonovich_into(u, h, p, F, s);
    // Ito correction pieces: s.ug still holds u's grid values.
    cross_into(s.ug, h, s.t1);
    analyze_into(s.t1, G, s.ws);
    synthesize_into(G, s.t2, s.ws);
    cross_into(s.t2, h, s.t1);
    analyze_into(s.t1, corr, s.ws);
    const double g2 = coeff_dot(G, G);

    if (k > 0) {
      // increment of M over [t_{k-1}, t_k]; step_drift still holds the
      // left-point drift of that interval
      double inc2 = 0;
      for (size_t i = 0; i < dim; ++i) {
        const double dm =
            traj.snaps[k].c[i] - traj.snaps[k - 1].c[i] - step_drift[i];
        inc2 += dm * dm;
      }
      out.qv_realized += inc2;
      out.qv_predicted += 0.5 * dt * p.lambda3 * p.lambda3 * (prev_g2 + g2);
    }
    if (k < steps) {
      for (size_t i = 0; i < dim; ++i) {
        step_drift[i] =
            (F.c[i] + 0.5 * p.lambda3 * p.lambda3 * corr.c[i]) * dt;
        drift_acc[i] += step_drift[i];
      }
      for (int i = 0; i < 5; ++i)
        out.probe_var[i] +=
            p.lambda3 * p.lambda3 * dt * G.c[i] * G.c[i];
    }
    prev_g2 = g2;
  }

  for (int i = 0; i < 5; ++i)
    out.probe_M[i] =
        traj.snaps[steps].c[i] - traj.snaps[0].c[i] - drift_acc[i];
  return out;
}

MartingaleReport martingale_diagnostics(
    const std::vector<MartingalePathStats>& paths) {
  if (paths.size() < 100)
    throw ConfigError(
        "ensemble.num_paths: martingale diagnostics need at least 100 paths "
        "for statistical power, got " +
        std::to_string(paths.size()));
  MartingaleReport rep;
  rep.num_paths = static_cast<int>(paths.size());
  for (int i = 0; i < 5; ++i) {
    std::vector<double> vals;
    vals.reserve(paths.size());
    double var_acc = 0;
    for (const auto& p : paths) {
      vals.push_back(p.probe_M[i]);
      var_acc += p.probe_var[i];
    }
    const Stat s = mean_se(vals);
    rep.probes[i] = {s.mean, s.se, s.se > 0 ? std::fabs(s.mean) / s.se : 0.0,
                     std::sqrt(var_acc / static_cast<double>(paths.size()))};
  }
  std::vector<double> ratios;
  ratios.reserve(paths.size());
  for (const auto& p : paths)
    if (p.qv_predicted > 0) ratios.push_back(p.qv_realized / p.qv_predicted);
  if (ratios.empty())
    throw DataError("martingale_diagnostics: no path had positive predicted "
                    "quadratic variation");
  const Stat s = mean_se(ratios);
  rep.qv_ratio_mean = s.mean;
  rep.qv_ratio_se = s.se;
  rep.qv_ratio_half_convention = 2.0 * s.mean;
  return rep;
}

TrajectorySummary summarize_trajectory(const Trajectory& traj,
                                       const GridField& h,
                                       const PhysParams& p) {
  TrajectorySummary out;
  out.seed = traj.seed;
  out.initial = traj.obs.front();
  out.final_obs = traj.obs.back();
  out.final_state = traj.snaps.back();

  double int_cs = 0, int_t65 = 0;
  double sup_e = traj.obs.front().energy, sup_s = traj.obs.front().sphere;
  for (size_t k = 0; k < traj.obs.size(); ++k) {
    const Observables& o = traj.obs[k];
    sup_e = std::max(sup_e, o.energy);
    sup_s = std::max(sup_s, o.sphere);
    if (k + 1 < traj.obs.size()) {
      const Observables& q = traj.obs[k + 1];
      int_cs += 0.5 * traj.dt * (o.cross_sq + q.cross_sq);
      int_t65 += 0.5 * traj.dt *
                 (o.triple_65 * o.triple_65 + q.triple_65 * q.triple_65);
    }
  }
  out.sup_energy = sup_e;
  out.sup_sphere = sup_s;
  out.int_cross_sq = int_cs;
  out.int_triple65_sq = int_t65;
  out.l2_drift = std::fabs(out.final_obs.l2 - out.initial.l2) /
                 std::max(out.initial.l2, 1e-300);

  if (traj.snaps.size() >= 33) {
    out.besov_l65 = besov_norm(traj, 0.375, 9.0, BesovSpace::grid_l65);
    out.besov_l2 = besov_norm(traj, 0.375, 9.0, BesovSpace::coeff_l2);
    out.besov_dual = besov_norm(traj, 0.375, 9.0, BesovSpace::dual_h1);
  } else {
    out.besov_l65 = out.besov_l2 = out.besov_dual = kNaN;
  }

  if (dense_snapshots(traj) && traj.dom->num_modes() >= 2) {
    out.mart = martingale_path_stats(traj, h, p);
  } else {
    out.mart.probe_M.fill(kNaN);
    out.mart.qv_realized = out.mart.qv_predicted = kNaN;
  }
  return out;
}

std::vector<std::pair<std::string, Stat>> apriori_report(
    const std::vector<TrajectorySummary>& summaries) {
  auto collect = [&](auto getter) {
    std::vector<double> vals;
    vals.reserve(summaries.size());
    for (const auto& s : summaries) {
      const double v = getter(s);
      if (std::isfinite(v)) vals.push_back(v);
    }
    return mean_se(vals);
  };
  std::vector<std::pair<std::string, Stat>> out;
  out.emplace_back("sup_energy", collect([](const TrajectorySummary& s) {
                     return s.sup_energy;
                   }));
  out.emplace_back("int_cross_sq", collect([](const TrajectorySummary& s) {
                     return s.int_cross_sq;
                   }));
  out.emplace_back("int_triple65_sq", collect([](const TrajectorySummary& s) {
                     return s.int_triple65_sq;
                   }));
  out.emplace_back("sup_sphere", collect([](const TrajectorySummary& s) {
                     return s.sup_sphere;
                   }));
  out.emplace_back("final_sphere", collect([](const TrajectorySummary& s) {
                     return s.final_obs.sphere;
                   }));
  out.emplace_back("besov_l65", collect([](const TrajectorySummary& s) {
                     return s.besov_l65;
                   }));
  out.emplace_back("besov_l2", collect([](const TrajectorySummary& s) {
                     return s.besov_l2;
                   }));
  out.emplace_back("besov_dual", collect([](const TrajectorySummary& s) {
                     return s.besov_dual;
                   }));
  out.emplace_back("l2_drift", collect([](const TrajectorySummary& s) {
                     return s.l2_drift;
                   }));
  // A statistic every path lacks (besov under sparse snapshots) is
  // dropped rather than reported as NaN, which JSON cannot carry.
  std::erase_if(out, [](const std::pair<std::string, Stat>& e) {
    return !std::isfinite(e.second.mean);
  });
  return out;
}

}  // namespace sllg
