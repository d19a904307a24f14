// Command line front end.  Subcommands:
//   simulate     integrate an ensemble and write paths/fields/report
//   verify       run the self-check battery against a configuration
//   convergence  strong-order study over a dt ladder, or a mode-count
//                sweep when ensemble.n_sweep is set instead
//   martingale   ensemble martingale statistics
//
// Exit codes: 0 success, 1 failed paths or failed checks or runtime error,
// 2 invalid configuration, 3 I/O error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sllg/config.hpp"
#include "sllg/ensemble.hpp"
#include "sllg/errors.hpp"
#include "sllg/verification.hpp"
#include "sllg/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  int workers = 0;
  bool quiet = false;
  bool allow_zero_damping = false;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config_path, "configuration file (INI)");
  sub->add_option("--override", a.overrides,
                  "section.key=value, may be repeated")
      ->type_size(1);
  sub->add_option("--out", a.out, "output directory (default from config)");
  sub->add_option("--workers", a.workers,
                  "worker threads, 0 = hardware concurrency");
  sub->add_flag("--quiet", a.quiet, "suppress progress output");
  sub->add_flag("--allow-zero-damping", a.allow_zero_damping,
                "accept lambda2 = 0; dissipation checks are skipped")
      ->group("");  // hidden
}

sllg::Config load_config(const CommonArgs& a) {
  sllg::Config cfg;
  if (!a.config_path.empty()) cfg = sllg::parse_config_file(a.config_path);
  for (const std::string& ov : a.overrides) sllg::apply_override(cfg, ov);
  cfg.allow_zero_damping = a.allow_zero_damping;
  if (!a.out.empty()) cfg.output.directory = a.out;
  sllg::validate_config(cfg);
  return cfg;
}

sllg::RunOptions run_options(const CommonArgs& a, const sllg::Config& cfg) {
  sllg::RunOptions ro;
  ro.out_dir = cfg.output.directory;
  ro.workers = a.workers;
  ro.quiet = a.quiet;
  return ro;
}

int cmd_simulate(const CommonArgs& a) {
  const sllg::Config cfg = load_config(a);
  const sllg::RunOptions ro = run_options(a, cfg);
  const sllg::EnsembleResult r = sllg::run_ensemble(cfg, ro);
  sllg::write_simulate_report(ro.out_dir, cfg, r);
  if (!a.quiet)
    std::cerr << "simulate: " << r.num_ok() << "/" << r.summaries.size()
              << " paths ok, report in " << ro.out_dir << "\n";
  return r.failures.empty() ? 0 : 1;
}

int cmd_verify(const CommonArgs& a) {
  const sllg::Config cfg = load_config(a);
  const std::vector<sllg::CheckResult> results =
      sllg::run_verification(cfg, a.workers, a.quiet);
  for (const sllg::CheckResult& r : results) {
    std::printf("[%s] %s", sllg::to_string(r.status), r.name.c_str());
    if (r.status != sllg::CheckStatus::skipped)
      std::printf("  value=%.3e threshold=%.3e", r.value, r.threshold);
    if (!r.note.empty()) std::printf("  (%s)", r.note.c_str());
    std::printf("\n");
  }
  sllg::write_verify_report(cfg.output.directory, cfg, results);
  const bool ok = sllg::all_passed(results);
  std::printf("verify: %s\n", ok ? "all checks passed" : "FAILURES present");
  return ok ? 0 : 1;
}

int cmd_convergence(const CommonArgs& a) {
  const sllg::Config cfg = load_config(a);
  const sllg::RunOptions ro = run_options(a, cfg);
  const bool has_dt = !cfg.ensemble.dt_sweep.empty();
  const bool has_n = !cfg.ensemble.n_sweep.empty();
  if (has_dt == has_n)
    throw sllg::ConfigError(
        "convergence needs exactly one of ensemble.dt_sweep (strong order in "
        "dt) or ensemble.n_sweep (statistics per mode count)");
  if (has_n) {
    const sllg::ModeSweepReport rep = sllg::mode_sweep(cfg, ro);
    sllg::write_mode_sweep_report(ro.out_dir, cfg, rep);
    if (!a.quiet)
      std::cerr << "convergence: mode sweep over " << rep.ns.size()
                << " levels, report in " << ro.out_dir << "\n";
    return 0;
  }
  const sllg::ConvergenceReport rep = sllg::convergence_study(cfg, ro);
  sllg::write_convergence_report(ro.out_dir, cfg, rep);
  if (!a.quiet) {
    for (const auto& [scheme, slope] : rep.slope)
      std::cerr << "convergence: " << scheme << " order " << slope << "\n";
    std::cerr << "convergence: report in " << ro.out_dir << "\n";
  }
  return 0;
}

int cmd_martingale(const CommonArgs& a) {
  sllg::Config cfg = load_config(a);
  // The statistics need dense increments regardless of what the config
  // records for file output.
  cfg.recording.policy = "every_step";
  cfg.recording.stride = 1;
  const sllg::RunOptions ro = run_options(a, cfg);
  const sllg::EnsembleResult r = sllg::run_ensemble(cfg, ro);
  std::vector<sllg::MartingalePathStats> stats;
  for (const auto& s : r.summaries)
    if (s.has_value()) stats.push_back(s->mart);
  const sllg::MartingaleReport rep = sllg::martingale_diagnostics(stats);
  sllg::write_martingale_report(ro.out_dir, cfg, r, rep);
  if (!a.quiet) {
    std::cerr << "martingale: " << rep.num_paths << " paths, qv ratio "
              << rep.qv_ratio_mean << " +- " << rep.qv_ratio_se << "\n";
    for (int i = 0; i < 5; ++i)
      std::cerr << "martingale: probe " << i << " z = " << rep.probes[i].z
                << "\n";
  }
  return r.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral simulator for the stochastic Landau-Lifshitz-"
               "Gilbert equation"};
  app.set_version_flag("--version", std::string(sllg::version_string));
  app.require_subcommand(1);

  CommonArgs args[4];
  CLI::App* simulate = app.add_subcommand("simulate", "integrate an ensemble");
  add_common(simulate, args[0]);
  CLI::App* verify = app.add_subcommand("verify", "run the self-check battery");
  add_common(verify, args[1]);
  CLI::App* convergence =
      app.add_subcommand("convergence", "strong-order study over a dt ladder");
  add_common(convergence, args[2]);
  CLI::App* martingale =
      app.add_subcommand("martingale", "ensemble martingale statistics");
  add_common(martingale, args[3]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version land here with exit code 0; anything else is
    // a usage error and shares the config-error exit code.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(args[0]);
    if (verify->parsed()) return cmd_verify(args[1]);
    if (convergence->parsed()) return cmd_convergence(args[2]);
    if (martingale->parsed()) return cmd_martingale(args[3]);
  } catch (const sllg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sllg::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
