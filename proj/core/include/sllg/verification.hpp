#pragma once

#include <string>
#include <vector>

#include "sllg/config.hpp"

namespace sllg {

enum class CheckStatus { pass, fail, skipped };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double value = 0;      // measured violation or statistic
  double threshold = 0;
  std::string note;
};

const char* to_string(CheckStatus s);

// The verification battery: transform exactness (round trip, Parseval,
// adjointness, Green identity), the algebraic identities of the
// projected vector fields, norm conservation and energy balance along
// short runs, the interpolation inequalities on random fields, and the
// martingale statistics at a reduced path count.  Zero-damping configs
// (CLI escape hatch) skip the dissipation-based checks.
std::vector<CheckResult> run_verification(const Config& cfg, int workers,
                                          bool quiet);

bool all_passed(const std::vector<CheckResult>& results);

void write_verify_report(const std::string& dir, const Config& cfg,
                         const std::vector<CheckResult>& results);

}  // namespace sllg
