#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace robust_mean {

// SplitMix64 finalizer (Steele, Lea & Flood). Constants:
//   increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive combination of a seed with stream coordinates; used to give
// every (cell, trial, purpose) its own independent generator.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Seeded stream with portable variate generation. The engine is std::mt19937_64
// (fully specified by the standard); the transforms are implemented here because
// the <random> distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();
  // Gamma(shape, 1) by Marsaglia-Tsang.
  double gamma(double shape);
  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }
  bool coin(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Uniform random permutation of 0..n-1 (Fisher-Yates); a pure function of (seed, n).
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

// k distinct indices of 0..n-1, sorted ascending.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng);

}  // namespace robust_mean
