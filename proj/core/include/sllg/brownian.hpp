#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sllg {

// splitmix64 finalizer; decorrelates per-path seeds derived from one
// master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

// Standard normals from mt19937_64 via explicit Box-Muller.
// std::normal_distribution is implementation-defined, which would break
// byte-identical outputs across toolchains.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double next();

 private:
  double uniform();  // in (0, 1)
  std::mt19937_64 rng_;
  double spare_ = 0;
  bool have_spare_ = false;
};

// Increments of one scalar Wiener path on a uniform grid.
struct BrownianPath {
  double dt = 0;
  std::uint64_t seed = 0;
  int level = 0;  // how many refine_half applications produced it
  std::vector<double> dW;

  long steps() const { return static_cast<long>(dW.size()); }
  double total_time() const { return dt * steps(); }
  std::vector<double> cumulative() const;  // W at grid times, W[0] = 0

  // Conditionally refine to dt/2 via the Brownian bridge: each pair of
  // new increments sums to the old one exactly, so runs at different
  // resolutions are driven by the same underlying path.
  BrownianPath refine_half() const;
};

// requires dt > 0 and T an integer multiple of dt within 1e-12 relative.
BrownianPath generate_path(std::uint64_t seed, double T, double dt);

}  // namespace sllg
