#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "sllg/domain.hpp"
#include "sllg/errors.hpp"
#include "sllg/field.hpp"
#include "sllg/spectral.hpp"

using namespace sllg;

namespace {

constexpr double kPi = 3.14159265358979323846;

SpectralField random_field(DomainPtr dom, unsigned seed, double smooth = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SpectralField u = SpectralField::zeros(dom);
  for (long k = 0; k < dom->num_modes(); ++k) {
    const double damp = std::pow(1.0 + dom->eigenvalue(k), smooth);
    for (int c = 0; c < 3; ++c) u.c[k * 3 + c] = dist(rng) / damp;
  }
  return u;
}

}  // namespace

TEST_SUITE("domain") {
  TEST_CASE("1d factory pads a dummy axis") {
    DomainPtr d = Domain::make_1d(1.0, 8, 32);
    CHECK(d->dim() == 1);
    CHECK(d->modes(0) == 8);
    CHECK(d->modes(1) == 1);
    CHECK(d->grid(1) == 1);
    CHECK(d->num_modes() == 8);
    CHECK(d->num_grid() == 32);
    CHECK(d->volume() == doctest::Approx(1.0));
  }

  TEST_CASE("eigenvalues are (k pi / L)^2, tensorized") {
    DomainPtr d = Domain::make(2, {2.0, 3.0}, {4, 5}, {8, 10});
    for (int k0 = 0; k0 < 4; ++k0)
      for (int k1 = 0; k1 < 5; ++k1) {
        const double want = std::pow(k0 * kPi / 2.0, 2) +
                            std::pow(k1 * kPi / 3.0, 2);
        CHECK(d->eigenvalue(k0 * 5 + k1) == doctest::Approx(want).epsilon(1e-14));
      }
    CHECK(d->max_eigenvalue() ==
          doctest::Approx(std::pow(3 * kPi / 2.0, 2) +
                          std::pow(4 * kPi / 3.0, 2)));
  }

  TEST_CASE("rejects aliasing grids and bad arguments") {
    CHECK_THROWS_AS(Domain::make_1d(1.0, 8, 7), ConfigError);
    CHECK_THROWS_AS(Domain::make_1d(0.0, 8, 16), ConfigError);
    CHECK_THROWS_AS(Domain::make_1d(1.0, 0, 16), ConfigError);
  }
}

TEST_SUITE("spectral") {
  TEST_CASE("analyze of cos^2(pi x) hits the closed-form coefficients") {
    // cos^2 = 1/2 + cos(2 pi x)/2: coefficient 1/2 on the constant mode
    // (e0 = 1) and 1/(2 sqrt 2) on mode 2 (e2 = sqrt2 cos(2 pi x)).
    DomainPtr d = Domain::make_1d(1.0, 8, 32);
    GridField g = sample_function(d, [](double x, double) {
      const double c = std::cos(kPi * x);
      return std::array<double, 3>{c * c, 0.0, 0.0};
    });
    SpectralField c = analyze(g);
    CHECK(c.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.at(2, 0) ==
          doctest::Approx(0.35355339059327373).epsilon(1e-14));
    double off = 0;
    for (long k = 0; k < 8; ++k)
      for (int m = 0; m < 3; ++m)
        if (!(m == 0 && (k == 0 || k == 2)))
          off = std::max(off, std::fabs(c.at(k, m)));
    CHECK(off < 1e-14);
  }

  TEST_CASE("round trip, Parseval, adjointness at working tolerance") {
    for (DomainPtr d : {Domain::make_1d(1.0, 16, 32),
                        Domain::make(2, {1.0, 2.0}, {6, 5}, {12, 10})}) {
      const SpectralField u = random_field(d, 7);
      const GridField g = synthesize(u);
      const SpectralField back = analyze(g);
      for (size_t i = 0; i < u.c.size(); ++i)
        CHECK(back.c[i] == doctest::Approx(u.c[i]).epsilon(1e-12));

      CHECK(coeff_dot(back, back) ==
            doctest::Approx(grid_inner(g, g)).epsilon(1e-10));

      // adjointness against non-band-limited grid data
      GridField raw = GridField::zeros(d);
      std::mt19937_64 rng(11);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (double& v : raw.v) v = dist(rng);
      const SpectralField c = random_field(d, 13);
      CHECK(coeff_dot(analyze(raw), c) ==
            doctest::Approx(grid_inner(raw, synthesize(c))).epsilon(1e-12));
    }
  }

  TEST_CASE("derivative synthesis matches the analytic derivative") {
    DomainPtr d = Domain::make_1d(2.0, 6, 16);
    SpectralField u = SpectralField::zeros(d);
    u.c[3 * 3 + 1] = 1.0;  // mode 3, y component
    const GridField dg = synthesize_deriv(u, 0);
    for (int j = 0; j < 16; ++j) {
      const double x = (j + 0.5) * 2.0 / 16.0;
      const double want = -(3 * kPi / 2.0) * std::sqrt(2.0 / 2.0) *
                          std::sin(3 * kPi * x / 2.0);
      CHECK(dg.at(j, 1) == doctest::Approx(want).epsilon(1e-13));
      CHECK(dg.at(j, 0) == 0.0);
    }
  }

  TEST_CASE("h1 seminorm agrees with the quadrature of |grad u|^2") {
    DomainPtr d = Domain::make(2, {1.0, 1.5}, {5, 4}, {10, 8});
    const SpectralField u = random_field(d, 3);
    double quad = 0;
    for (int axis = 0; axis < 2; ++axis) {
      const GridField dg = synthesize_deriv(u, axis);
      quad += grid_inner(dg, dg);
    }
    CHECK(h1_seminorm(u) == doctest::Approx(std::sqrt(quad)).epsilon(1e-12));
  }

  TEST_CASE("laplacian multiplies by -mu") {
    DomainPtr d = Domain::make_1d(1.0, 8, 16);
    const SpectralField u = random_field(d, 5);
    const SpectralField lap = laplacian(u);
    for (long k = 0; k < 8; ++k)
      for (int m = 0; m < 3; ++m)
        CHECK(lap.at(k, m) ==
              doctest::Approx(-d->eigenvalue(k) * u.at(k, m)).epsilon(1e-14));
  }

  TEST_CASE("quadrature pairing of band-limited products is exact") {
    // every inner product the solver takes pairs trig polynomials of
    // degree < 2N per axis, which the midpoint rule integrates exactly
    DomainPtr d = Domain::make_1d(1.0, 16, 32);
    DomainPtr fine = Domain::make_1d(1.0, 16, 512);
    const SpectralField a = random_field(d, 21);
    const SpectralField b = random_field(d, 22);
    const double coarse = grid_inner(synthesize(a), synthesize(b));
    const double ref =
        grid_inner(synthesize(regrid(a, fine)), synthesize(regrid(b, fine)));
    CHECK(coarse == doctest::Approx(ref).epsilon(1e-12));
  }

  TEST_CASE("truncate zeroes the tail, regrid embeds exactly") {
    DomainPtr d = Domain::make_1d(1.0, 8, 16);
    const SpectralField u = random_field(d, 9);
    const SpectralField t = truncate(u, 4);
    for (long k = 0; k < 8; ++k)
      for (int m = 0; m < 3; ++m)
        CHECK(t.at(k, m) == (k < 4 ? u.at(k, m) : 0.0));

    // regrid: same modes on a finer collocation grid, coefficients moved
    // verbatim
    DomainPtr finer = Domain::make_1d(1.0, 8, 64);
    const SpectralField e = regrid(u, finer);
    CHECK(e.dom->grid(0) == 64);
    for (size_t i = 0; i < u.c.size(); ++i) CHECK(e.c[i] == u.c[i]);

    CHECK_THROWS_AS(regrid(u, Domain::make_1d(1.0, 12, 24)), DataError);
    CHECK_THROWS_AS(regrid(u, Domain::make_1d(2.0, 8, 16)), DataError);
  }

  TEST_CASE("lp norms: exact on constants, monotone embedding, gate") {
    DomainPtr d = Domain::make_1d(2.0, 4, 8);
    GridField g = sample_function(
        d, [](double, double) { return std::array<double, 3>{3.0, 0.0, 4.0}; });
    // |(3,0,4)| = 5 everywhere; |u|_p = 5 * vol^{1/p}
    for (double p : {1.0, 1.2, 1.5, 2.0, 6.0})
      CHECK(lp_norm(g, p) ==
            doctest::Approx(5.0 * std::pow(2.0, 1.0 / p)).epsilon(1e-13));
    CHECK(lp_norm(g, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(5.0));
    CHECK_THROWS_AS(lp_norm(g, 2.5), ConfigError);
  }
}
