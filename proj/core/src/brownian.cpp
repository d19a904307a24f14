#include "sllg/brownian.hpp"

#include <cmath>
#include <string>

#include "sllg/errors.hpp"

namespace sllg {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
// Salt for the bridge-refinement stream so it never collides with the
// base increment stream of the same seed.
constexpr std::uint64_t kBridgeSalt = 0x62726964676500ULL;
}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double NormalSampler::uniform() {
  // 53-bit mantissa; reject the single value that would hit log(0).
  for (;;) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double NormalSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

std::vector<double> BrownianPath::cumulative() const {
  std::vector<double> w(dW.size() + 1, 0.0);
  for (size_t k = 0; k < dW.size(); ++k) w[k + 1] = w[k] + dW[k];
  return w;
}

BrownianPath BrownianPath::refine_half() const {
  BrownianPath fine;
  fine.dt = 0.5 * dt;
  fine.seed = seed;
  fine.level = level + 1;
  fine.dW.resize(dW.size() * 2);
  NormalSampler normals(
      split_seed(seed, kBridgeSalt + static_cast<std::uint64_t>(level)));
  const double half_sd = 0.5 * std::sqrt(dt);  // sd of the bridge midpoint
  for (size_t k = 0; k < dW.size(); ++k) {
    const double xi = half_sd * normals.next();
    fine.dW[2 * k] = 0.5 * dW[k] + xi;
    fine.dW[2 * k + 1] = 0.5 * dW[k] - xi;
  }
  return fine;
}

BrownianPath generate_path(std::uint64_t seed, double T, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(T) || T <= 0.0)
    throw ConfigError("time: T and dt must be finite and positive");
  const double ratio = T / dt;
  const long steps = static_cast<long>(std::llround(ratio));
  if (steps < 1 || std::fabs(steps * dt - T) > 1e-12 * std::max(1.0, std::fabs(T)))
    throw ConfigError("time.dt: " + std::to_string(dt) +
                      " does not divide T = " + std::to_string(T));
  BrownianPath p;
  p.dt = dt;
  p.seed = seed;
  p.dW.resize(steps);
  NormalSampler normals(seed);
  const double sd = std::sqrt(dt);
  for (long k = 0; k < steps; ++k) p.dW[k] = sd * normals.next();
  return p;
}

}  // namespace sllg
