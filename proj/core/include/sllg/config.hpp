#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sllg/domain.hpp"
#include "sllg/field.hpp"
#include "sllg/integrator.hpp"

namespace sllg {

struct DomainConfig {
  int dim = 1;
  std::array<double, 2> lengths{1.0, 1.0};
  int n = 16;   // retained modes per axis
  int N = 0;    // collocation points per axis; 0 means 2n
};
struct PhysicsConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  std::string h_family = "constant";   // constant | cosine
  std::vector<double> h_params{0.0, 0.0, 1.0};
};
struct InitialConfig {
  std::string family = "winding";      // winding | constant
  std::vector<double> params{2.0};
};
struct TimeConfig {
  double T = 1.0;
  double dt = 1e-3;
};
struct SchemeSection {
  std::string name = "midpoint";       // midpoint | heun
  double midpoint_tol = 1e-12;
  int midpoint_max_iter = 50;
};
struct EnsembleSection {
  int num_paths = 1;
  std::uint64_t master_seed = 1;
  std::vector<int> n_sweep;            // mode-count study
  std::vector<double> dt_sweep;        // strong-order study, each dt = 2x previous
};
struct RecordingConfig {
  std::string policy = "every_step";   // every_step | stride | observables_only
  int stride = 1;
  bool write_fields = false;
};
struct OutputConfig {
  std::string directory = "out";
};

struct Config {
  DomainConfig domain;
  PhysicsConfig physics;
  InitialConfig initial;
  TimeConfig time;
  SchemeSection scheme;
  EnsembleSection ensemble;
  RecordingConfig recording;
  OutputConfig output;
  // Set only by the CLI escape hatch, never from a file.  Disables the
  // lambda2 > 0 requirement; dissipation checks are skipped downstream.
  bool allow_zero_damping = false;
};

// INI-style file: [section] then key = value lines, # or ; comments.
// Unknown sections or keys are errors naming the offending key.
Config parse_config_file(const std::string& path);
Config parse_config_text(const std::string& text,
                         const std::string& origin = "<string>");

// assignment is "section.key=value", same grammar as the file body.
void apply_override(Config& cfg, const std::string& assignment);

// Throws ConfigError naming the first invalid key.
void validate_config(const Config& cfg);

// Canonical JSON rendering (sorted keys, schema_version field included).
std::string canonical_config_json(const Config& cfg);
// FNV-1a 64 of the canonical JSON with output.directory removed, so runs
// differing only in destination hash identically.
std::uint64_t config_hash(const Config& cfg);

DomainPtr make_domain(const Config& cfg);
// Same box, different mode count; grid scales as grid_factor * n.
DomainPtr make_domain_with_modes(const Config& cfg, int n, int grid_factor = 2);
SpectralField make_initial(const Config& cfg, DomainPtr dom);
GridField make_h(const Config& cfg, DomainPtr dom);
PhysParams make_params(const Config& cfg);
Scheme make_scheme(const Config& cfg);
SchemeConfig make_scheme_config(const Config& cfg);
RecordingPolicy make_recording(const Config& cfg);

}  // namespace sllg
