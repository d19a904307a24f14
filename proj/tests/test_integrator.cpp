#include <cmath>

#include "doctest.h"
#include "sllg/brownian.hpp"
#include "sllg/config.hpp"
#include "sllg/errors.hpp"
#include "sllg/integrator.hpp"
#include "sllg/llg.hpp"
#include "sllg/spectral.hpp"

using namespace sllg;

namespace {

Config base_config() {
  Config cfg;
  cfg.domain.n = 8;
  cfg.time.dt = 1e-3;
  return cfg;
}

GridField constant_h(DomainPtr dom, double x, double y, double z) {
  return sample_function(
      dom, [=](double, double) { return std::array<double, 3>{x, y, z}; });
}

}  // namespace

TEST_SUITE("integrator") {
  TEST_CASE("midpoint conserves the L2 norm to solver tolerance") {
    const Config cfg = base_config();
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u0 = make_initial(cfg, dom);
    const GridField h = make_h(cfg, dom);
    const PhysParams p = PhysParams::make(1.0, 1.0, 1.0);
    const BrownianPath path = generate_path(3, 0.1, 1e-3);
    const Trajectory t =
        integrate(u0, h, p, Scheme::midpoint, SchemeConfig{}, path);
    const double n0 = t.obs.front().l2;
    for (const Observables& o : t.obs)
      CHECK(std::fabs(o.l2 - n0) < 1e-12 * n0);
  }

  TEST_CASE("heun drifts off the sphere of constant norm only slowly") {
    const Config cfg = base_config();
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u0 = make_initial(cfg, dom);
    const GridField h = make_h(cfg, dom);
    const PhysParams p = PhysParams::make(1.0, 1.0, 1.0);
    const BrownianPath path = generate_path(3, 0.1, 1e-3);
    const Trajectory t =
        integrate(u0, h, p, Scheme::heun, SchemeConfig{}, path);
    const double n0 = t.obs.front().l2;
    const double drift = std::fabs(t.obs.back().l2 - n0) / n0;
    CHECK(drift > 1e-12);  // not exactly conservative
    CHECK(drift < 1e-4);   // but second-order accurate in the norm
  }

  TEST_CASE("noise-only dynamics is the closed-form rotation") {
    // lambda1 = lambda2 = 0, h = z: u(t) rotates about z by the angle
    // lambda3 W(t).  The midpoint step realizes the Cayley approximation
    // of that rotation, with per-step angle error O(dW^3).
    Config cfg = base_config();
    cfg.initial.family = "constant";
    cfg.initial.params = {1.0, 0.0, 0.0};
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u0 = make_initial(cfg, dom);
    const GridField h = constant_h(dom, 0.0, 0.0, 1.0);
    const double lambda3 = 0.9;
    const PhysParams p = PhysParams::make_unchecked(0.0, 0.0, lambda3);
    const BrownianPath path = generate_path(17, 0.1, 1e-3);
    const Trajectory t =
        integrate(u0, h, p, Scheme::midpoint, SchemeConfig{}, path);

    const double W = [&] {
      double acc = 0;
      for (double dw : path.dW) acc += dw;
      return acc;
    }();
    const SpectralField& uT = t.final_state();
    // constant fields live on mode 0 with weight sqrt(L) = 1
    const double cx = uT.at(0, 0), cy = uT.at(0, 1), cz = uT.at(0, 2);
    // per-step angle error is (lambda3 dW)^3 / 12, partially cancelling
    CHECK(std::fabs(cx - std::cos(lambda3 * W)) < 2e-4);
    CHECK(std::fabs(cy + std::sin(lambda3 * W)) < 2e-4);
    CHECK(std::fabs(cz) < 1e-9);
  }

  TEST_CASE("heun and midpoint agree on a smooth stretch") {
    const Config cfg = base_config();
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u0 = make_initial(cfg, dom);
    const GridField h = make_h(cfg, dom);
    const PhysParams p = PhysParams::make(1.0, 0.5, 0.7);
    const BrownianPath path = generate_path(23, 0.02, 1e-4);
    const Trajectory a =
        integrate(u0, h, p, Scheme::heun, SchemeConfig{}, path);
    const Trajectory b =
        integrate(u0, h, p, Scheme::midpoint, SchemeConfig{}, path);
    SpectralField diff = a.final_state();
    axpy(-1.0, b.final_state(), diff);
    // both schemes are first order; at dt = 1e-4 over this window the
    // gap sits near 2.5e-5
    CHECK(l2_norm(diff) > 1e-12);
    CHECK(l2_norm(diff) < 1e-4);
  }

  TEST_CASE("observables carry the quadrature identities") {
    const Config cfg = base_config();
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u = make_initial(cfg, dom);
    const GridField h = constant_h(dom, 0.0, 0.0, 1.0);
    const Observables o = compute_observables(u, h, 0.25);
    CHECK(o.t == 0.25);
    CHECK(o.l2 == doctest::Approx(l2_norm(u)).epsilon(1e-14));
    CHECK(o.h1 == doctest::Approx(h1_seminorm(u)).epsilon(1e-14));
    CHECK(o.energy == doctest::Approx(0.5 * o.h1 * o.h1).epsilon(1e-13));

    const GridField ug = synthesize(u);
    const GridField lap = synthesize(laplacian(u));
    const GridField cr = cross(ug, lap);
    CHECK(o.cross_sq == doctest::Approx(grid_inner(cr, cr)).epsilon(1e-12));
    CHECK(o.triple_65 ==
          doctest::Approx(lp_norm(cross(ug, cr), 1.2)).epsilon(1e-12));
    // sphere deviation of the projected winding initial state is small
    // but strictly positive
    CHECK(o.sphere > 0);
    CHECK(o.sphere < 2e-3);
  }

  TEST_CASE("non-convergence surfaces as IntegrationError with position") {
    const Config cfg = base_config();
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u0 = make_initial(cfg, dom);
    const GridField h = make_h(cfg, dom);
    const PhysParams p = PhysParams::make(1.0, 50.0, 1.0);
    SchemeConfig sc;
    sc.midpoint_max_iter = 2;
    sc.midpoint_tol = 1e-15;
    const BrownianPath path = generate_path(9, 0.5, 0.1);
    try {
      integrate(u0, h, p, Scheme::midpoint, sc, path);
      FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
      CHECK(e.step() >= 0);
      CHECK(e.time() >= 0.0);
    }
  }

  TEST_CASE("snapshot policies record what they promise") {
    const Config cfg = base_config();
    const DomainPtr dom = make_domain(cfg);
    const SpectralField u0 = make_initial(cfg, dom);
    const GridField h = make_h(cfg, dom);
    const PhysParams p = PhysParams::make(1.0, 1.0, 1.0);
    const BrownianPath path = generate_path(2, 0.01, 1e-3);  // 10 steps

    RecordingPolicy every;
    const Trajectory a = integrate(u0, h, p, Scheme::midpoint, {}, path, every);
    CHECK(a.obs.size() == 11);
    CHECK(a.snaps.size() == 11);
    CHECK(a.snap_steps.front() == 0);
    CHECK(a.snap_steps.back() == 10);

    RecordingPolicy strided{RecordingPolicy::Mode::stride, 4};
    const Trajectory b =
        integrate(u0, h, p, Scheme::midpoint, {}, path, strided);
    CHECK(b.obs.size() == 11);  // observables stay dense
    CHECK(b.snap_steps == std::vector<long>{0, 4, 8, 10});

    RecordingPolicy lean{RecordingPolicy::Mode::observables_only, 1};
    const Trajectory c = integrate(u0, h, p, Scheme::midpoint, {}, path, lean);
    CHECK(c.snap_steps == std::vector<long>{0, 10});
  }

  TEST_CASE("bad inputs are rejected before stepping") {
    const Config cfg = base_config();
    const DomainPtr dom = make_domain(cfg);
    SpectralField u0 = make_initial(cfg, dom);
    const GridField h = make_h(cfg, dom);
    const PhysParams p = PhysParams::make(1.0, 1.0, 1.0);
    const BrownianPath path = generate_path(2, 0.01, 1e-3);

    SpectralField bad = u0;
    bad.c[0] = std::nan("");
    CHECK_THROWS_AS(integrate(bad, h, p, Scheme::midpoint, {}, path),
                    DataError);

    DomainPtr other = Domain::make_1d(1.0, 8, 32);
    const GridField wrong_h = constant_h(other, 0, 0, 1);
    CHECK_THROWS_AS(integrate(u0, wrong_h, p, Scheme::midpoint, {}, path),
                    DataError);
  }
}
