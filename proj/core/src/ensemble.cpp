#include "sllg/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "sllg/errors.hpp"
#include "sllg/spectral.hpp"

namespace fs = std::filesystem;

namespace sllg {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << body;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create directory '" + dir.string() +
                  "': " + ec.message());
}

// RFC 4180: CRLF row endings; all our fields are plain numbers so no
// quoting is ever required.
std::string observables_csv(const Trajectory& traj) {
  std::string s;
  s.reserve(traj.obs.size() * 220 + 128);
  s +=
      "t,l2,h1,energy,cross_sq,triple_65,sphere,strat_pair,noise_grad_sq,"
      "corr_pair\r\n";
  for (const Observables& o : traj.obs) {
    s += fmt17(o.t);
    s += ',';
    s += fmt17(o.l2);
    s += ',';
    s += fmt17(o.h1);
    s += ',';
    s += fmt17(o.energy);
    s += ',';
    s += fmt17(o.cross_sq);
    s += ',';
    s += fmt17(o.triple_65);
    s += ',';
    s += fmt17(o.sphere);
    s += ',';
    s += fmt17(o.strat_pair);
    s += ',';
    s += fmt17(o.noise_grad_sq);
    s += ',';
    s += fmt17(o.corr_pair);
    s += "\r\n";
  }
  return s;
}

std::string field_csv(const SpectralField& u) {
  const Domain& d = *u.dom;
  const GridField g = synthesize(u);
  std::string s = d.dim() == 1 ? "x,ux,uy,uz\r\n" : "x,y,ux,uy,uz\r\n";
  for (int j0 = 0; j0 < d.grid(0); ++j0) {
    for (int j1 = 0; j1 < d.grid(1); ++j1) {
      const long j = d.grid_index(j0, j1);
      s += fmt17(d.grid_coord(0, j0));
      if (d.dim() == 2) {
        s += ',';
        s += fmt17(d.grid_coord(1, j1));
      }
      s += ',';
      s += fmt17(g.v[j * 3]);
      s += ',';
      s += fmt17(g.v[j * 3 + 1]);
      s += ',';
      s += fmt17(g.v[j * 3 + 2]);
      s += "\r\n";
    }
  }
  return s;
}

nlohmann::json stat_json(const Stat& s) {
  return nlohmann::json{{"mean", s.mean}, {"se", s.se}};
}

nlohmann::json failures_json(const std::vector<PathFailure>& failures) {
  nlohmann::json arr = nlohmann::json::array();
  for (const PathFailure& f : failures)
    arr.push_back({{"index", f.index},
                   {"seed", std::to_string(f.seed)},
                   {"step", f.step},
                   {"error", f.error}});
  return arr;
}

// Fixed-size pool; work items are claimed through an atomic counter so
// the path-to-result mapping never depends on scheduling.
void run_pool(int workers, int jobs, const std::function<void(int)>& body) {
  std::atomic<int> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto loop = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        return;
      }
    }
  };
  const int W = std::max(1, std::min(workers, jobs));
  std::vector<std::thread> pool;
  pool.reserve(W - 1);
  for (int w = 1; w < W; ++w) pool.emplace_back(loop);
  loop();
  for (std::thread& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);
}

int resolve_workers(const RunOptions& opts) {
  if (opts.workers > 0) return opts.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

long EnsembleResult::num_ok() const {
  long n = 0;
  for (const auto& s : summaries)
    if (s.has_value()) ++n;
  return n;
}

void write_config_json(const std::string& dir, const Config& cfg) {
  ensure_dir(dir);
  nlohmann::json j = nlohmann::json::parse(canonical_config_json(cfg));
  j["config_hash"] = std::to_string(config_hash(cfg));
  write_text_file(fs::path(dir) / "config.json", j.dump(2) + "\n");
}

EnsembleResult run_ensemble(const Config& cfg, const RunOptions& opts) {
  validate_config(cfg);
  const DomainPtr dom = make_domain(cfg);
  const SpectralField u0 = make_initial(cfg, dom);
  const GridField h = make_h(cfg, dom);
  const PhysParams p = make_params(cfg);
  const Scheme scheme = make_scheme(cfg);
  const SchemeConfig sc = make_scheme_config(cfg);
  const RecordingPolicy rec = make_recording(cfg);
  const std::uint64_t hash = config_hash(cfg);
  const int P = cfg.ensemble.num_paths;

  const bool writing = !opts.out_dir.empty();
  if (writing) {
    write_config_json(opts.out_dir, cfg);
    ensure_dir(fs::path(opts.out_dir) / "paths");
  }

  EnsembleResult result;
  result.config_hash = hash;
  result.summaries.resize(P);
  std::mutex fail_mu;

  run_pool(resolve_workers(opts), P, [&](int i) {
    const std::uint64_t seed = split_seed(cfg.ensemble.master_seed, i);
    try {
      const BrownianPath path = generate_path(seed, cfg.time.T, cfg.time.dt);
      Trajectory traj = integrate(u0, h, p, scheme, sc, path, rec);
      traj.config_hash = hash;
      if (writing) {
        write_text_file(
            fs::path(opts.out_dir) / "paths" / (std::to_string(i) + ".csv"),
            observables_csv(traj));
        if (cfg.recording.write_fields) {
          const fs::path fdir =
              fs::path(opts.out_dir) / "fields" / std::to_string(i);
          ensure_dir(fdir);
          for (size_t s = 0; s < traj.snaps.size(); ++s)
            write_text_file(
                fdir / (std::to_string(traj.snap_steps[s]) + ".csv"),
                field_csv(traj.snaps[s]));
        }
      }
      result.summaries[i] = summarize_trajectory(traj, h, p);
    } catch (const IntegrationError& e) {
      std::lock_guard<std::mutex> lock(fail_mu);
      result.failures.push_back({i, seed, e.step(), e.what()});
    } catch (const DataError& e) {
      std::lock_guard<std::mutex> lock(fail_mu);
      result.failures.push_back({i, seed, -1, e.what()});
    }
  });

  std::sort(result.failures.begin(), result.failures.end(),
            [](const PathFailure& a, const PathFailure& b) {
              return a.index < b.index;
            });
  if (!opts.quiet)
    std::fprintf(stderr, "ensemble: %ld/%d paths ok\n", result.num_ok(), P);
  return result;
}

std::vector<std::pair<std::string, Stat>> aggregate(const EnsembleResult& r) {
  std::vector<TrajectorySummary> ok;
  ok.reserve(r.summaries.size());
  for (const auto& s : r.summaries)
    if (s.has_value()) ok.push_back(*s);

  auto out = apriori_report(ok);
  auto add = [&](const char* name, auto getter) {
    std::vector<double> xs;
    xs.reserve(ok.size());
    for (const auto& s : ok) {
      const double v = getter(s);
      if (std::isfinite(v)) xs.push_back(v);
    }
    out.emplace_back(name, mean_se(xs));
  };
  add("final_l2", [](const TrajectorySummary& s) { return s.final_obs.l2; });
  add("final_h1", [](const TrajectorySummary& s) { return s.final_obs.h1; });
  add("final_energy",
      [](const TrajectorySummary& s) { return s.final_obs.energy; });
  return out;
}

ConvergenceReport convergence_study(const Config& cfg,
                                    const RunOptions& opts) {
  validate_config(cfg);
  const auto& sweep = cfg.ensemble.dt_sweep;
  if (sweep.size() < 3)
    throw ConfigError(
        "ensemble.dt_sweep: need at least three entries (reference plus two "
        "levels) to fit an order");
  const int L = static_cast<int>(sweep.size());
  for (double dt : sweep) {
    const double ratio = cfg.time.T / dt;
    const long steps = std::llround(ratio);
    if (steps < 1 || std::fabs(steps * dt - cfg.time.T) >
                         1e-12 * std::max(1.0, cfg.time.T))
      throw ConfigError("ensemble.dt_sweep: " + std::to_string(dt) +
                        " does not divide time.T");
  }

  const DomainPtr dom = make_domain(cfg);
  const SpectralField u0 = make_initial(cfg, dom);
  const GridField h = make_h(cfg, dom);
  const PhysParams p = make_params(cfg);
  const SchemeConfig sc = make_scheme_config(cfg);
  const int P = cfg.ensemble.num_paths;
  const long coarse_steps = std::llround(cfg.time.T / sweep[L - 1]);

  const std::vector<std::string> scheme_names{"heun", "midpoint"};
  const std::vector<Scheme> schemes{Scheme::heun, Scheme::midpoint};

  // errors[scheme][level][path]; level j is sweep[j], j = L-1 coarsest
  std::vector<std::vector<std::vector<double>>> errs(
      2, std::vector<std::vector<double>>(L, std::vector<double>(P, 0.0)));
  std::vector<char> path_ok(P, 1);

  run_pool(resolve_workers(opts), P, [&](int i) {
    const std::uint64_t seed = split_seed(cfg.ensemble.master_seed, i);
    // one underlying path, materialized at every level
    std::vector<BrownianPath> paths(L);
    paths[L - 1] = generate_path(seed, cfg.time.T, sweep[L - 1]);
    for (int j = L - 2; j >= 0; --j) paths[j] = paths[j + 1].refine_half();

    try {
      for (int s = 0; s < 2; ++s) {
        std::vector<std::vector<SpectralField>> level_snaps(L);
        for (int j = 0; j < L; ++j) {
          RecordingPolicy rec;
          rec.mode = RecordingPolicy::Mode::stride;
          rec.stride =
              static_cast<int>(std::llround(paths[j].steps() /
                                            static_cast<double>(coarse_steps)));
          Trajectory traj =
              integrate(u0, h, p, schemes[s], sc, paths[j], rec);
          if (static_cast<long>(traj.snaps.size()) != coarse_steps + 1)
            throw DataError("convergence_study: snapshot grid mismatch");
          level_snaps[j] = std::move(traj.snaps);
        }
        for (int j = 1; j < L; ++j) {
          double sup = 0;
          for (long k = 0; k <= coarse_steps; ++k) {
            SpectralField diff = level_snaps[j][k];
            axpy(-1.0, level_snaps[0][k], diff);
            sup = std::max(sup, l2_norm(diff));
          }
          errs[s][j][i] = sup;
        }
      }
    } catch (const IntegrationError&) {
      path_ok[i] = 0;
    } catch (const DataError&) {
      path_ok[i] = 0;
    }
  });

  ConvergenceReport rep;
  for (int j = L - 1; j >= 1; --j) rep.dts.push_back(sweep[j]);
  for (int s = 0; s < 2; ++s) {
    std::vector<double> level_err;
    for (int j = L - 1; j >= 1; --j) {
      double sum = 0;
      long cnt = 0;
      for (int i = 0; i < P; ++i)
        if (path_ok[i]) {
          sum += errs[s][j][i];
          ++cnt;
        }
      if (cnt == 0)
        throw DataError("convergence_study: every path failed");
      level_err.push_back(sum / cnt);
    }
    // least-squares slope of log error against log dt
    const int m = static_cast<int>(level_err.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < m; ++j) {
      const double x = std::log(rep.dts[j]);
      const double y = std::log(std::max(level_err[j], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.errors[scheme_names[s]] = level_err;
    rep.slope[scheme_names[s]] = slope;
  }

  if (!opts.out_dir.empty()) write_convergence_report(opts.out_dir, cfg, rep);
  return rep;
}

ModeSweepReport mode_sweep(const Config& cfg, const RunOptions& opts) {
  validate_config(cfg);
  const auto& ns = cfg.ensemble.n_sweep;
  if (ns.size() < 2)
    throw ConfigError("ensemble.n_sweep: need at least two mode counts");
  for (size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1])
      throw ConfigError("ensemble.n_sweep: entries must strictly increase");

  ModeSweepReport rep;
  for (int n : ns) {
    Config sub = cfg;
    sub.domain.n = n;
    sub.domain.N = 0;  // keep the 2n default per level
    sub.output.directory = cfg.output.directory;
    RunOptions sub_opts = opts;
    sub_opts.out_dir.clear();  // per-level files are not written
    EnsembleResult r = run_ensemble(sub, sub_opts);
    if (r.num_ok() == 0)
      throw DataError("mode_sweep: every path failed at n = " +
                      std::to_string(n));
    rep.ns.push_back(n);
    rep.stats.push_back(aggregate(r));
  }
  if (!opts.out_dir.empty()) write_mode_sweep_report(opts.out_dir, cfg, rep);
  return rep;
}

void write_simulate_report(const std::string& dir, const Config& cfg,
                           const EnsembleResult& r) {
  write_config_json(dir, cfg);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "simulate";
  j["config_hash"] = std::to_string(r.config_hash);
  j["num_paths"] = static_cast<int>(r.summaries.size());
  j["num_ok"] = r.num_ok();
  j["failures"] = failures_json(r.failures);
  nlohmann::json agg;
  for (const auto& [name, stat] : aggregate(r)) agg[name] = stat_json(stat);
  j["aggregates"] = agg;
  ensure_dir(dir);
  write_text_file(fs::path(dir) / "report.json", j.dump(2) + "\n");
}

void write_convergence_report(const std::string& dir, const Config& cfg,
                              const ConvergenceReport& rep) {
  write_config_json(dir, cfg);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "convergence";
  j["config_hash"] = std::to_string(config_hash(cfg));
  j["dts"] = rep.dts;
  nlohmann::json errs, slopes;
  for (const auto& [name, v] : rep.errors) errs[name] = v;
  for (const auto& [name, v] : rep.slope) slopes[name] = v;
  j["errors"] = errs;
  j["slope"] = slopes;
  write_text_file(fs::path(dir) / "report.json", j.dump(2) + "\n");
}

void write_mode_sweep_report(const std::string& dir, const Config& cfg,
                             const ModeSweepReport& rep) {
  write_config_json(dir, cfg);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "mode_sweep";
  j["config_hash"] = std::to_string(config_hash(cfg));
  j["ns"] = rep.ns;
  nlohmann::json per_n = nlohmann::json::array();
  for (size_t i = 0; i < rep.ns.size(); ++i) {
    nlohmann::json stats;
    for (const auto& [name, stat] : rep.stats[i]) stats[name] = stat_json(stat);
    per_n.push_back({{"n", rep.ns[i]}, {"stats", stats}});
  }
  j["levels"] = per_n;
  write_text_file(fs::path(dir) / "report.json", j.dump(2) + "\n");
}

void write_martingale_report(const std::string& dir, const Config& cfg,
                             const EnsembleResult& r,
                             const MartingaleReport& rep) {
  write_config_json(dir, cfg);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "martingale";
  j["config_hash"] = std::to_string(r.config_hash);
  j["num_paths"] = rep.num_paths;
  j["failures"] = failures_json(r.failures);
  nlohmann::json probes = nlohmann::json::array();
  for (const ProbeStat& p : rep.probes)
    probes.push_back({{"mean", p.mean},
                      {"se", p.se},
                      {"z", p.z},
                      {"pred_sd", p.pred_sd}});
  j["probes"] = probes;
  j["qv_ratio"] = {{"mean", rep.qv_ratio_mean}, {"se", rep.qv_ratio_se}};
  // Two normalizations of the predicted quadratic variation circulate;
  // the data decides.  A ratio near 1 backs the first convention, near 2
  // (in this field) would back the halved one.
  j["qv_ratio_half_convention"] = rep.qv_ratio_half_convention;
  j["qv_note"] =
      "qv_ratio uses predicted = lambda3^2 * int |g|^2 ds; "
      "qv_ratio_half_convention rescales as if the prediction carried an "
      "extra factor 1/2";
  write_text_file(fs::path(dir) / "report.json", j.dump(2) + "\n");
}

}  // namespace sllg
