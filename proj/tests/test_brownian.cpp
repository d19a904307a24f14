#include <cmath>
#include <cstring>

#include "doctest.h"
#include "sllg/brownian.hpp"
#include "sllg/errors.hpp"

using namespace sllg;

TEST_SUITE("brownian") {
  TEST_CASE("split_seed decorrelates and is stable") {
    const std::uint64_t a = split_seed(1, 0);
    const std::uint64_t b = split_seed(1, 1);
    const std::uint64_t c = split_seed(2, 0);
    CHECK(a != b);
    CHECK(a != c);
    CHECK(split_seed(1, 0) == a);  // pure function
  }

  TEST_CASE("same seed, same bits") {
    const BrownianPath p = generate_path(12345, 1.0, 1e-2);
    const BrownianPath q = generate_path(12345, 1.0, 1e-2);
    REQUIRE(p.steps() == 100);
    CHECK(std::memcmp(p.dW.data(), q.dW.data(),
                      p.dW.size() * sizeof(double)) == 0);
    const BrownianPath r = generate_path(12346, 1.0, 1e-2);
    CHECK(std::memcmp(p.dW.data(), r.dW.data(),
                      p.dW.size() * sizeof(double)) != 0);
  }

  TEST_CASE("sampler moments look normal") {
    NormalSampler s(9001);
    const long n = 200000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (long i = 0; i < n; ++i) {
      const double z = s.next();
      m1 += z;
      m2 += z * z;
      m4 += z * z * z * z;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::fabs(m1) < 4.0 / std::sqrt(double(n)));          // mean 0
    CHECK(std::fabs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));      // var 1
    CHECK(std::fabs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / n));     // kurtosis 3
  }

  TEST_CASE("bridge refinement preserves coarse increments") {
    const BrownianPath coarse = generate_path(777, 0.5, 1e-2);
    const BrownianPath fine = coarse.refine_half();
    REQUIRE(fine.steps() == 2 * coarse.steps());
    CHECK(fine.dt == doctest::Approx(coarse.dt / 2).epsilon(1e-16));
    CHECK(fine.level == coarse.level + 1);
    for (long k = 0; k < coarse.steps(); ++k) {
      const double sum = fine.dW[2 * k] + fine.dW[2 * k + 1];
      CHECK(sum == doctest::Approx(coarse.dW[k]).epsilon(1e-14));
    }
    // second refinement keeps the level-0 increments too
    const BrownianPath finer = fine.refine_half();
    for (long k = 0; k < coarse.steps(); ++k) {
      const double sum = finer.dW[4 * k] + finer.dW[4 * k + 1] +
                         finer.dW[4 * k + 2] + finer.dW[4 * k + 3];
      CHECK(sum == doctest::Approx(coarse.dW[k]).epsilon(1e-13));
    }
  }

  TEST_CASE("refinement detail is deterministic per seed and level") {
    const BrownianPath a = generate_path(31, 0.1, 1e-2).refine_half();
    const BrownianPath b = generate_path(31, 0.1, 1e-2).refine_half();
    CHECK(std::memcmp(a.dW.data(), b.dW.data(),
                      a.dW.size() * sizeof(double)) == 0);
  }

  TEST_CASE("cumulative path starts at zero and sums increments") {
    const BrownianPath p = generate_path(5, 0.05, 1e-2);
    const std::vector<double> w = p.cumulative();
    REQUIRE(w.size() == size_t(p.steps() + 1));
    CHECK(w[0] == 0.0);
    double acc = 0;
    for (long k = 0; k < p.steps(); ++k) {
      acc += p.dW[k];
      CHECK(w[k + 1] == doctest::Approx(acc).epsilon(1e-15));
    }
  }

  TEST_CASE("non-divisible horizon is rejected with the offending keys") {
    CHECK_THROWS_WITH_AS(generate_path(1, 1.0, 3e-3),
                         doctest::Contains("time.dt"), ConfigError);
    CHECK_THROWS_AS(generate_path(1, -1.0, 1e-3), ConfigError);
  }
}
