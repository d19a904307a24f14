#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sllg/brownian.hpp"
#include "sllg/config.hpp"
#include "sllg/ensemble.hpp"
#include "sllg/errors.hpp"

using namespace sllg;
namespace fs = std::filesystem;

namespace {

Config small_config() {
  Config cfg;
  cfg.domain.n = 6;
  cfg.time.T = 0.02;
  cfg.time.dt = 1e-3;
  cfg.ensemble.num_paths = 6;
  cfg.ensemble.master_seed = 42;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() /
           (std::string("sllg_test_") + tag + "_" +
            std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("per-path seeds derive from the master seed by index") {
    const Config cfg = small_config();
    RunOptions ro;
    ro.quiet = true;
    const EnsembleResult r = run_ensemble(cfg, ro);
    REQUIRE(r.summaries.size() == 6);
    for (int i = 0; i < 6; ++i) {
      REQUIRE(r.summaries[i].has_value());
      CHECK(r.summaries[i]->seed == split_seed(42, i));
    }
    CHECK(r.num_ok() == 6);
    CHECK(r.failures.empty());
  }

  TEST_CASE("results do not depend on the worker count") {
    const Config cfg = small_config();
    RunOptions one;
    one.workers = 1;
    one.quiet = true;
    RunOptions many;
    many.workers = 5;
    many.quiet = true;
    const EnsembleResult a = run_ensemble(cfg, one);
    const EnsembleResult b = run_ensemble(cfg, many);
    REQUIRE(a.summaries.size() == b.summaries.size());
    for (size_t i = 0; i < a.summaries.size(); ++i) {
      const auto& sa = a.summaries[i];
      const auto& sb = b.summaries[i];
      REQUIRE(sa.has_value());
      REQUIRE(sb.has_value());
      CHECK(sa->final_obs.l2 == sb->final_obs.l2);  // bitwise
      CHECK(sa->final_obs.energy == sb->final_obs.energy);
      CHECK(sa->final_state.c == sb->final_state.c);
    }
  }

  TEST_CASE("output tree is complete and byte-stable across worker counts") {
    Config cfg = small_config();
    cfg.ensemble.num_paths = 3;
    cfg.recording.policy = "stride";
    cfg.recording.stride = 5;
    cfg.recording.write_fields = true;

    TempDir d1("w1"), d2("w4");
    RunOptions r1;
    r1.out_dir = d1.path.string();
    r1.workers = 1;
    r1.quiet = true;
    RunOptions r2;
    r2.out_dir = d2.path.string();
    r2.workers = 4;
    r2.quiet = true;
    const EnsembleResult a = run_ensemble(cfg, r1);
    const EnsembleResult b = run_ensemble(cfg, r2);
    write_simulate_report(r1.out_dir, cfg, a);
    write_simulate_report(r2.out_dir, cfg, b);

    std::vector<fs::path> rel;
    for (const auto& e : fs::recursive_directory_iterator(d1.path))
      if (e.is_regular_file())
        rel.push_back(fs::relative(e.path(), d1.path));
    REQUIRE(!rel.empty());
    // expected layout
    CHECK(fs::exists(d1.path / "config.json"));
    CHECK(fs::exists(d1.path / "report.json"));
    CHECK(fs::exists(d1.path / "paths" / "0.csv"));
    CHECK(fs::exists(d1.path / "paths" / "2.csv"));
    CHECK(fs::exists(d1.path / "fields" / "1" / "0.csv"));
    CHECK(fs::exists(d1.path / "fields" / "1" / "20.csv"));
    for (const fs::path& p : rel) {
      CAPTURE(p.string());
      CHECK(slurp(d1.path / p) == slurp(d2.path / p));
    }
  }

  TEST_CASE("csv rows are RFC 4180 with 17 significant digits") {
    Config cfg = small_config();
    cfg.ensemble.num_paths = 1;
    TempDir d("csv");
    RunOptions ro;
    ro.out_dir = d.path.string();
    ro.quiet = true;
    run_ensemble(cfg, ro);
    const std::string body = slurp(d.path / "paths" / "0.csv");
    CHECK(body.find("\r\n") != std::string::npos);
    CHECK(body.find("t,l2,h1,energy,cross_sq,triple_65,sphere,") == 0);
    // a full-precision double survives the round trip
    const size_t line2 = body.find("\r\n") + 2;
    const size_t comma = body.find(',', line2);  // after the t column
    const double parsed = std::strtod(body.c_str() + comma + 1, nullptr);
    const EnsembleResult r = run_ensemble(cfg, RunOptions{"", 1, true});
    CHECK(parsed == r.summaries[0]->initial.l2);
  }

  TEST_CASE("failed paths are reported in order and excluded from stats") {
    Config cfg = small_config();
    cfg.scheme.midpoint_max_iter = 2;
    cfg.scheme.midpoint_tol = 1e-16;
    cfg.physics.lambda2 = 80.0;
    cfg.time.dt = 2e-3;
    cfg.time.T = 0.02;
    RunOptions ro;
    ro.quiet = true;
    const EnsembleResult r = run_ensemble(cfg, ro);
    CHECK(r.num_ok() < 6);
    REQUIRE(!r.failures.empty());
    for (size_t i = 1; i < r.failures.size(); ++i)
      CHECK(r.failures[i - 1].index < r.failures[i].index);
    for (const PathFailure& f : r.failures) {
      CHECK(!r.summaries[f.index].has_value());
      CHECK(f.error.find("midpoint") != std::string::npos);
      CHECK(f.step >= 0);
    }
  }

  TEST_CASE("aggregate skips unavailable statistics instead of poisoning") {
    Config cfg = small_config();  // 20 steps, sparse snapshots
    cfg.recording.policy = "observables_only";
    RunOptions ro;
    ro.quiet = true;
    const EnsembleResult r = run_ensemble(cfg, ro);
    for (const auto& [name, stat] : aggregate(r)) {
      CAPTURE(name);
      CHECK(std::isfinite(stat.mean));
      CHECK(std::isfinite(stat.se));
    }
  }

  TEST_CASE("convergence study fits a strong order near one") {
    Config cfg = small_config();
    cfg.domain.n = 6;
    cfg.time.T = 0.032;
    cfg.ensemble.num_paths = 4;
    cfg.ensemble.dt_sweep = {5e-4, 1e-3, 2e-3, 4e-3};
    RunOptions ro;
    ro.quiet = true;
    const ConvergenceReport rep = convergence_study(cfg, ro);
    REQUIRE(rep.dts == std::vector<double>{4e-3, 2e-3, 1e-3});
    for (const char* scheme : {"heun", "midpoint"}) {
      REQUIRE(rep.errors.count(scheme) == 1);
      const auto& errs = rep.errors.at(scheme);
      REQUIRE(errs.size() == 3);
      CHECK(errs[0] > errs[2]);  // coarser is worse
      // over this deliberately tiny horizon (8 steps at the coarsest
      // level) the deterministic second-order part of both schemes still
      // dominates the coupled difference, so the fit lands between the
      // strong order 1 and the pre-asymptotic 2
      CHECK(rep.slope.at(scheme) > 0.6);
      CHECK(rep.slope.at(scheme) < 2.6);
    }
  }

  TEST_CASE("convergence study refuses a short ladder") {
    Config cfg = small_config();
    cfg.ensemble.dt_sweep = {1e-3, 2e-3};
    RunOptions ro;
    ro.quiet = true;
    CHECK_THROWS_WITH_AS(convergence_study(cfg, ro),
                         doctest::Contains("dt_sweep"), ConfigError);
  }

  TEST_CASE("mode sweep reports per-n aggregates") {
    Config cfg = small_config();
    cfg.ensemble.num_paths = 3;
    cfg.ensemble.n_sweep = {4, 8};
    RunOptions ro;
    ro.quiet = true;
    const ModeSweepReport rep = mode_sweep(cfg, ro);
    REQUIRE(rep.ns == std::vector<int>{4, 8});
    REQUIRE(rep.stats.size() == 2);
    for (const auto& stats : rep.stats) {
      bool has_sphere = false;
      for (const auto& [name, s] : stats)
        if (name == std::string("final_sphere")) {
          has_sphere = true;
          CHECK(std::isfinite(s.mean));
        }
      CHECK(has_sphere);
    }
  }
}
