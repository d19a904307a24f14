#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "sllg/config.hpp"
#include "sllg/errors.hpp"
#include "sllg/spectral.hpp"

using namespace sllg;

TEST_SUITE("config") {
  TEST_CASE("defaults validate and resolve the collocation grid") {
    Config cfg;
    validate_config(cfg);
    CHECK(cfg.domain.n == 16);
    const DomainPtr dom = make_domain(cfg);
    CHECK(dom->modes(0) == 16);
    CHECK(dom->grid(0) == 32);  // N = 0 means 2n
  }

  TEST_CASE("ini text covers every section") {
    const char* text = R"(
# full tour
[domain]
dim = 2
lengths = 1.0, 2.0
n = 6
N = 14

[physics]
lambda1 = 0.5
lambda2 = 0.25
lambda3 = 1.5
h_family = cosine
h_params = 0.8

[initial]
family = winding
params = 3

[time]
T = 0.5
dt = 2.5e-3

[scheme]
name = heun

[ensemble]
num_paths = 4
master_seed = 99
dt_sweep = 5e-4, 1e-3, 2e-3

[recording]
policy = stride
stride = 10
write_fields = true

[output]
directory = /tmp/somewhere
)";
    const Config cfg = parse_config_text(text, "tour.ini");
    validate_config(cfg);
    CHECK(cfg.domain.dim == 2);
    CHECK(cfg.domain.lengths[1] == 2.0);
    CHECK(cfg.domain.N == 14);
    CHECK(cfg.physics.h_family == "cosine");
    CHECK(cfg.physics.h_params == std::vector<double>{0.8});
    CHECK(cfg.initial.params == std::vector<double>{3.0});
    CHECK(cfg.scheme.name == "heun");
    CHECK(cfg.ensemble.master_seed == 99);
    CHECK(cfg.ensemble.dt_sweep == std::vector<double>{5e-4, 1e-3, 2e-3});
    CHECK(cfg.recording.stride == 10);
    CHECK(cfg.recording.write_fields);
    CHECK(cfg.output.directory == "/tmp/somewhere");
  }

  TEST_CASE("errors name the offending key or line") {
    CHECK_THROWS_WITH_AS(parse_config_text("[domain]\nbogus = 1\n", "x.ini"),
                         doctest::Contains("domain.bogus"), ConfigError);
    // unknown sections are flagged when a key lands in them
    CHECK_THROWS_WITH_AS(parse_config_text("[nope]\nx = 1\n", "x.ini"),
                         doctest::Contains("[nope]"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("[time]\ndt = fast\n", "x.ini"),
                         doctest::Contains("time.dt"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("dt = 1\n", "x.ini"),
                         doctest::Contains("x.ini:1"), ConfigError);

    Config cfg;
    cfg.time.dt = 3e-4;  // does not divide T = 1
    CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("time.dt"),
                         ConfigError);

    cfg = Config{};
    cfg.domain.dim = 3;
    CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("domain.dim"),
                         ConfigError);

    cfg = Config{};
    cfg.physics.lambda2 = 0.0;
    CHECK_THROWS_WITH_AS(validate_config(cfg),
                         doctest::Contains("physics.lambda2"), ConfigError);
    cfg.allow_zero_damping = true;
    CHECK_NOTHROW(validate_config(cfg));

    cfg = Config{};
    cfg.ensemble.dt_sweep = {1e-3, 3e-3};
    CHECK_THROWS_WITH_AS(validate_config(cfg),
                         doctest::Contains("ensemble.dt_sweep"), ConfigError);
    cfg.ensemble.dt_sweep = {2e-3, 1e-3};  // must ascend
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.ensemble.dt_sweep = {1e-3, 2e-3, 4e-3};
    CHECK_NOTHROW(validate_config(cfg));
  }

  TEST_CASE("the zero-damping escape hatch is not a file key") {
    CHECK_THROWS_AS(
        parse_config_text("[physics]\nallow_zero_damping = true\n", "x.ini"),
        ConfigError);
  }

  TEST_CASE("overrides use the same grammar and validation") {
    Config cfg;
    apply_override(cfg, "domain.n=24");
    apply_override(cfg, "physics.lambda3 = 0.25");
    apply_override(cfg, "initial.params=1, 0, 0");
    CHECK(cfg.domain.n == 24);
    CHECK(cfg.physics.lambda3 == 0.25);
    CHECK(cfg.initial.params == std::vector<double>{1.0, 0.0, 0.0});
    CHECK_THROWS_WITH_AS(apply_override(cfg, "nonsense"),
                         doctest::Contains("section.key=value"), ConfigError);
    CHECK_THROWS_WITH_AS(apply_override(cfg, "physics.mass=1"),
                         doctest::Contains("physics.mass"), ConfigError);
    // an empty value clears a list, so a file-configured sweep can be
    // switched off from the command line
    cfg.ensemble.dt_sweep = {1e-3, 2e-3};
    apply_override(cfg, "ensemble.dt_sweep=");
    CHECK(cfg.ensemble.dt_sweep.empty());
  }

  TEST_CASE("config hash ignores the output directory and nothing else") {
    Config a;
    Config b = a;
    b.output.directory = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.ensemble.master_seed = 2;
    CHECK(config_hash(a) != config_hash(b));

    // canonical form resolves the grid default so equivalent configs
    // stringify identically
    const std::string js = canonical_config_json(a);
    CHECK(js.find("\"schema_version\"") != std::string::npos);
    CHECK(js.find("\"N\": 32") != std::string::npos);
    Config c = a;
    c.domain.N = 32;
    CHECK(canonical_config_json(c) == js);
  }

  TEST_CASE("file loader reports missing files as I/O errors") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/sllg.ini"), IoError);
    const char* path = "/tmp/sllg_test_config.ini";
    {
      std::ofstream out(path);
      out << "[domain]\nn = 5\n";
    }
    const Config cfg = parse_config_file(path);
    CHECK(cfg.domain.n == 5);
    std::remove(path);
  }

  TEST_CASE("winding initial data is unit length up to the projection tail") {
    Config cfg;
    cfg.domain.n = 16;
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u = make_initial(cfg, dom);
    // |u|_L2^2 = volume on the sphere; the tail steals a little
    const double m = l2_norm(u);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(m < 1.0);  // strict: projection only removes mass
  }

  TEST_CASE("cosine h family samples a z-aligned standing profile") {
    Config cfg;
    cfg.physics.h_family = "cosine";
    cfg.physics.h_params = {2.0};
    const DomainPtr dom = make_domain(cfg);
    const GridField h = make_h(cfg, dom);
    for (long j = 0; j < dom->num_grid(); ++j) {
      CHECK(h.at(j, 0) == 0.0);
      CHECK(h.at(j, 1) == 0.0);
    }
    CHECK(lp_norm(h, std::numeric_limits<double>::infinity()) <= 2.0);
  }
}
