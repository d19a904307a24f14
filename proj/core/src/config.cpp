#include "sllg/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sllg/errors.hpp"
#include "sllg/spectral.hpp"

namespace sllg {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(key + ": not a number '" + v + "'");
  return x;
}

long parse_long(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const long x = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(key + ": not an integer '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || t[0] == '-')
    throw ConfigError(key + ": not an unsigned integer '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": not a boolean '" + v + "'");
}

// An empty value is an empty list, so an override can clear a sweep
// configured in the file.
std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  if (trim(v).empty()) return parts;
  std::string cur;
  for (char ch : v) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_doubles(const std::string& key,
                                  const std::string& v) {
  std::vector<double> out;
  for (const std::string& p : split_list(v)) out.push_back(parse_double(key, p));
  return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& p : split_list(v))
    out.push_back(static_cast<int>(parse_long(key, p)));
  return out;
}

void set_value(Config& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  const std::string full = section + "." + key;
  if (section == "domain") {
    if (key == "dim")
      cfg.domain.dim = static_cast<int>(parse_long(full, value));
    else if (key == "lengths") {
      const auto xs = parse_doubles(full, value);
      if (xs.size() < 1 || xs.size() > 2)
        throw ConfigError(full + ": expected one or two lengths");
      cfg.domain.lengths[0] = xs[0];
      cfg.domain.lengths[1] = xs.size() > 1 ? xs[1] : 1.0;
    } else if (key == "n")
      cfg.domain.n = static_cast<int>(parse_long(full, value));
    else if (key == "N")
      cfg.domain.N = static_cast<int>(parse_long(full, value));
    else
      throw ConfigError(full + ": unknown key");
  } else if (section == "physics") {
    if (key == "lambda1")
      cfg.physics.lambda1 = parse_double(full, value);
    else if (key == "lambda2")
      cfg.physics.lambda2 = parse_double(full, value);
    else if (key == "lambda3")
      cfg.physics.lambda3 = parse_double(full, value);
    else if (key == "h_family")
      cfg.physics.h_family = trim(value);
    else if (key == "h_params")
      cfg.physics.h_params = parse_doubles(full, value);
    else
      throw ConfigError(full + ": unknown key");
  } else if (section == "initial") {
    if (key == "family")
      cfg.initial.family = trim(value);
    else if (key == "params")
      cfg.initial.params = parse_doubles(full, value);
    else
      throw ConfigError(full + ": unknown key");
  } else if (section == "time") {
    if (key == "T")
      cfg.time.T = parse_double(full, value);
    else if (key == "dt")
      cfg.time.dt = parse_double(full, value);
    else
      throw ConfigError(full + ": unknown key");
  } else if (section == "scheme") {
    if (key == "name")
      cfg.scheme.name = trim(value);
    else if (key == "midpoint_tol")
      cfg.scheme.midpoint_tol = parse_double(full, value);
    else if (key == "midpoint_max_iter")
      cfg.scheme.midpoint_max_iter = static_cast<int>(parse_long(full, value));
    else
      throw ConfigError(full + ": unknown key");
  } else if (section == "ensemble") {
    if (key == "num_paths")
      cfg.ensemble.num_paths = static_cast<int>(parse_long(full, value));
    else if (key == "master_seed")
      cfg.ensemble.master_seed = parse_u64(full, value);
    else if (key == "n_sweep")
      cfg.ensemble.n_sweep = parse_ints(full, value);
    else if (key == "dt_sweep")
      cfg.ensemble.dt_sweep = parse_doubles(full, value);
    else
      throw ConfigError(full + ": unknown key");
  } else if (section == "recording") {
    if (key == "policy")
      cfg.recording.policy = trim(value);
    else if (key == "stride")
      cfg.recording.stride = static_cast<int>(parse_long(full, value));
    else if (key == "write_fields")
      cfg.recording.write_fields = parse_bool(full, value);
    else
      throw ConfigError(full + ": unknown key");
  } else if (section == "output") {
    if (key == "directory")
      cfg.output.directory = trim(value);
    else
      throw ConfigError(full + ": unknown key");
  } else {
    throw ConfigError("config: unknown section [" + section + "]");
  }
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": malformed section header '" + t + "'");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value, got '" + t + "'");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key outside any [section]");
    set_value(cfg, section, trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_override(Config& cfg, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment +
                      "' must look like section.key=value");
  const std::string target = trim(assignment.substr(0, eq));
  const size_t dot = target.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == target.size())
    throw ConfigError("override '" + assignment +
                      "' must look like section.key=value");
  set_value(cfg, target.substr(0, dot), target.substr(dot + 1),
            assignment.substr(eq + 1));
}

void validate_config(const Config& cfg) {
  if (cfg.domain.dim != 1 && cfg.domain.dim != 2)
    throw ConfigError("domain.dim: must be 1 or 2");
  for (int a = 0; a < cfg.domain.dim; ++a)
    if (!(cfg.domain.lengths[a] > 0) || !std::isfinite(cfg.domain.lengths[a]))
      throw ConfigError("domain.lengths: must be positive and finite");
  if (cfg.domain.n < 1) throw ConfigError("domain.n: need at least one mode");
  if (cfg.domain.N != 0 && cfg.domain.N < cfg.domain.n)
    throw ConfigError("domain.N: collocation grid must be at least domain.n");

  if (!std::isfinite(cfg.physics.lambda1) ||
      !std::isfinite(cfg.physics.lambda2) || !std::isfinite(cfg.physics.lambda3))
    throw ConfigError("physics.lambda: coefficients must be finite");
  if (cfg.allow_zero_damping) {
    if (cfg.physics.lambda2 < 0)
      throw ConfigError("physics.lambda2: damping cannot be negative");
  } else if (!(cfg.physics.lambda2 > 0)) {
    throw ConfigError("physics.lambda2: damping must be positive");
  }
  if (cfg.physics.h_family == "constant") {
    if (cfg.physics.h_params.size() != 3)
      throw ConfigError("physics.h_params: constant field needs 3 components");
  } else if (cfg.physics.h_family == "cosine") {
    if (cfg.physics.h_params.size() != 1)
      throw ConfigError("physics.h_params: cosine field needs 1 amplitude");
  } else {
    throw ConfigError("physics.h_family: unknown family '" +
                      cfg.physics.h_family + "'");
  }

  if (cfg.initial.family == "winding") {
    if (cfg.initial.params.size() != 1)
      throw ConfigError("initial.params: winding needs 1 parameter");
  } else if (cfg.initial.family == "constant") {
    if (cfg.initial.params.size() != 3)
      throw ConfigError("initial.params: constant needs 3 components");
    const double nrm = std::sqrt(cfg.initial.params[0] * cfg.initial.params[0] +
                                 cfg.initial.params[1] * cfg.initial.params[1] +
                                 cfg.initial.params[2] * cfg.initial.params[2]);
    if (!(nrm > 0))
      throw ConfigError("initial.params: constant vector must be nonzero");
  } else {
    throw ConfigError("initial.family: unknown family '" + cfg.initial.family +
                      "'");
  }

  if (!(cfg.time.T > 0) || !std::isfinite(cfg.time.T))
    throw ConfigError("time.T: must be positive and finite");
  if (!(cfg.time.dt > 0) || !std::isfinite(cfg.time.dt))
    throw ConfigError("time.dt: must be positive and finite");
  const double ratio = cfg.time.T / cfg.time.dt;
  const double steps = std::llround(ratio);
  if (steps < 1 ||
      std::fabs(steps * cfg.time.dt - cfg.time.T) >
          1e-12 * std::max(1.0, std::fabs(cfg.time.T)))
    throw ConfigError("time.dt: does not divide time.T");

  if (cfg.scheme.name != "midpoint" && cfg.scheme.name != "heun")
    throw ConfigError("scheme.name: unknown scheme '" + cfg.scheme.name + "'");
  if (!(cfg.scheme.midpoint_tol > 0))
    throw ConfigError("scheme.midpoint_tol: must be positive");
  if (cfg.scheme.midpoint_max_iter < 2)
    throw ConfigError("scheme.midpoint_max_iter: must be at least 2");

  if (cfg.ensemble.num_paths < 1)
    throw ConfigError("ensemble.num_paths: must be at least 1");
  for (int n : cfg.ensemble.n_sweep)
    if (n < 1) throw ConfigError("ensemble.n_sweep: entries must be >= 1");
  const auto& sweep = cfg.ensemble.dt_sweep;
  for (size_t i = 0; i < sweep.size(); ++i) {
    if (!(sweep[i] > 0))
      throw ConfigError("ensemble.dt_sweep: entries must be positive");
    if (i > 0 && std::fabs(sweep[i] / sweep[i - 1] - 2.0) > 1e-12)
      throw ConfigError(
          "ensemble.dt_sweep: entries must ascend with consecutive ratio "
          "exactly 2 (levels share one refined path)");
  }

  if (cfg.recording.policy != "every_step" && cfg.recording.policy != "stride" &&
      cfg.recording.policy != "observables_only")
    throw ConfigError("recording.policy: unknown policy '" +
                      cfg.recording.policy + "'");
  if (cfg.recording.stride < 1)
    throw ConfigError("recording.stride: must be at least 1");
  if (cfg.output.directory.empty())
    throw ConfigError("output.directory: must not be empty");
}

namespace {

nlohmann::json config_to_json(const Config& cfg) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["domain"] = {{"dim", cfg.domain.dim},
                 {"lengths", {cfg.domain.lengths[0], cfg.domain.lengths[1]}},
                 {"n", cfg.domain.n},
                 {"N", cfg.domain.N == 0 ? 2 * cfg.domain.n : cfg.domain.N}};
  j["physics"] = {{"lambda1", cfg.physics.lambda1},
                  {"lambda2", cfg.physics.lambda2},
                  {"lambda3", cfg.physics.lambda3},
                  {"h_family", cfg.physics.h_family},
                  {"h_params", cfg.physics.h_params}};
  j["initial"] = {{"family", cfg.initial.family},
                  {"params", cfg.initial.params}};
  j["time"] = {{"T", cfg.time.T}, {"dt", cfg.time.dt}};
  j["scheme"] = {{"name", cfg.scheme.name},
                 {"midpoint_tol", cfg.scheme.midpoint_tol},
                 {"midpoint_max_iter", cfg.scheme.midpoint_max_iter}};
  j["ensemble"] = {{"num_paths", cfg.ensemble.num_paths},
                   {"master_seed", cfg.ensemble.master_seed},
                   {"n_sweep", cfg.ensemble.n_sweep},
                   {"dt_sweep", cfg.ensemble.dt_sweep}};
  j["recording"] = {{"policy", cfg.recording.policy},
                    {"stride", cfg.recording.stride},
                    {"write_fields", cfg.recording.write_fields}};
  j["output"] = {{"directory", cfg.output.directory}};
  return j;
}

}  // namespace

std::string canonical_config_json(const Config& cfg) {
  return config_to_json(cfg).dump(2);
}

std::uint64_t config_hash(const Config& cfg) {
  nlohmann::json j = config_to_json(cfg);
  j.erase("output");  // destination must not change the identity of a run
  const std::string s = j.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

DomainPtr make_domain(const Config& cfg) {
  const int N = cfg.domain.N == 0 ? 2 * cfg.domain.n : cfg.domain.N;
  return Domain::make(cfg.domain.dim,
                      {cfg.domain.lengths[0], cfg.domain.lengths[1]},
                      {cfg.domain.n, cfg.domain.n}, {N, N});
}

DomainPtr make_domain_with_modes(const Config& cfg, int n, int grid_factor) {
  return Domain::make(cfg.domain.dim,
                      {cfg.domain.lengths[0], cfg.domain.lengths[1]}, {n, n},
                      {grid_factor * n, grid_factor * n});
}

SpectralField make_initial(const Config& cfg, DomainPtr dom) {
  std::function<std::array<double, 3>(double, double)> f;
  if (cfg.initial.family == "winding") {
    const double c = cfg.initial.params[0];
    const double L = dom->length(0);
    f = [c, L](double x, double) {
      const double th = c * kPi * x / L;
      return std::array<double, 3>{std::sin(th), 0.0, std::cos(th)};
    };
  } else {  // constant
    std::array<double, 3> v{cfg.initial.params[0], cfg.initial.params[1],
                            cfg.initial.params[2]};
    const double nrm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    v = {v[0] / nrm, v[1] / nrm, v[2] / nrm};
    f = [v](double, double) { return v; };
  }
  // Project on a finer quadrature grid so the coefficients are the true
  // projection, not its aliased approximation; mode-count sweeps compare
  // tails across n and aliasing would distort them.
  const int fine0 = std::max(4 * dom->modes(0), 256);
  const int fine1 = dom->dim() == 1 ? 1 : std::max(4 * dom->modes(1), 256);
  DomainPtr fine =
      Domain::make(dom->dim(), {dom->length(0), dom->length(1)},
                   {dom->modes(0), dom->modes(1)}, {fine0, fine1});
  return regrid(analyze(sample_function(fine, f)), dom);
}

GridField make_h(const Config& cfg, DomainPtr dom) {
  if (cfg.physics.h_family == "constant") {
    const std::array<double, 3> v{cfg.physics.h_params[0],
                                  cfg.physics.h_params[1],
                                  cfg.physics.h_params[2]};
    return sample_function(dom, [v](double, double) { return v; });
  }
  const double a = cfg.physics.h_params[0];
  const double L = dom->length(0);
  return sample_function(dom, [a, L](double x, double) {
    return std::array<double, 3>{0.0, 0.0, a * std::cos(kPi * x / L)};
  });
}

PhysParams make_params(const Config& cfg) {
  if (cfg.allow_zero_damping)
    return PhysParams::make_unchecked(cfg.physics.lambda1, cfg.physics.lambda2,
                                      cfg.physics.lambda3);
  return PhysParams::make(cfg.physics.lambda1, cfg.physics.lambda2,
                          cfg.physics.lambda3);
}

Scheme make_scheme(const Config& cfg) {
  return cfg.scheme.name == "heun" ? Scheme::heun : Scheme::midpoint;
}

SchemeConfig make_scheme_config(const Config& cfg) {
  return SchemeConfig{cfg.scheme.midpoint_tol, cfg.scheme.midpoint_max_iter};
}

RecordingPolicy make_recording(const Config& cfg) {
  RecordingPolicy rec;
  if (cfg.recording.policy == "every_step")
    rec.mode = RecordingPolicy::Mode::every_step;
  else if (cfg.recording.policy == "stride")
    rec.mode = RecordingPolicy::Mode::stride;
  else
    rec.mode = RecordingPolicy::Mode::observables_only;
  rec.stride = cfg.recording.stride;
  return rec;
}

}  // namespace sllg
