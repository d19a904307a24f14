#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sllg/config.hpp"
#include "sllg/diagnostics.hpp"

namespace sllg {

struct RunOptions {
  std::string out_dir;  // empty: nothing is written
  int workers = 0;      // 0 = hardware concurrency
  bool quiet = false;
};

struct PathFailure {
  int index = 0;
  std::uint64_t seed = 0;
  long step = -1;
  std::string error;
};

// Per-path summaries indexed by path number; failed paths leave their
// slot empty and are excluded from every aggregate.
struct EnsembleResult {
  std::vector<std::optional<TrajectorySummary>> summaries;
  std::vector<PathFailure> failures;
  std::uint64_t config_hash = 0;
  long num_ok() const;
};

// Integrate num_paths independent realizations (path i is seeded with
// split_seed(master_seed, i)) on a fixed worker pool.  File output and
// aggregation are deterministic functions of the per-path results, so
// byte-identical outputs are produced for any worker count.
EnsembleResult run_ensemble(const Config& cfg, const RunOptions& opts);

// Mean/SE over successful paths, in path-index order, keyed like
// apriori_report plus final-time observables.
std::vector<std::pair<std::string, Stat>> aggregate(const EnsembleResult& r);

// Strong-error study over cfg.ensemble.dt_sweep (validated: ascending,
// each consecutive ratio exactly 2).  All levels of one path share a
// single Brownian path via bridge refinement; the finest level is the
// reference and errors are mean over paths of the sup over shared times
// of the L2 distance.
struct ConvergenceReport {
  std::vector<double> dts;  // coarse to fine, excluding the reference
  std::map<std::string, std::vector<double>> errors;  // per scheme name
  std::map<std::string, double> slope;                // fitted order
};
ConvergenceReport convergence_study(const Config& cfg, const RunOptions& opts);

// Mode-count study over cfg.ensemble.n_sweep with shared driving paths;
// reports the aggregate statistics per n.
struct ModeSweepReport {
  std::vector<int> ns;
  std::vector<std::vector<std::pair<std::string, Stat>>> stats;  // per n
};
ModeSweepReport mode_sweep(const Config& cfg, const RunOptions& opts);

// Writes <dir>/config.json: the canonical configuration of the run plus
// its hash.  Creates the directory if needed.
void write_config_json(const std::string& dir, const Config& cfg);

// report.json writers (schema documented in docs/report_schema.json).
void write_simulate_report(const std::string& dir, const Config& cfg,
                           const EnsembleResult& r);
void write_convergence_report(const std::string& dir, const Config& cfg,
                              const ConvergenceReport& rep);
void write_mode_sweep_report(const std::string& dir, const Config& cfg,
                             const ModeSweepReport& rep);
void write_martingale_report(const std::string& dir, const Config& cfg,
                             const EnsembleResult& r,
                             const MartingaleReport& rep);

}  // namespace sllg
