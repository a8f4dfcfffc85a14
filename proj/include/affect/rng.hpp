#pragma once

#include <cstdint>

namespace affect {

// Deterministic 64-bit generator (SplitMix64, Steele et al.).
//
// The exact update is part of the library contract: corpus splits, negative
// sampling and weight init must reproduce bit-for-bit across platforms given
// the same seed, and the algorithm is small enough to re-derive expected
// outputs by hand in a few lines of any language.
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1): top 53 bits scaled by 2^-53.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). Plain modulo; the bias is ~n/2^64 and irrelevant at
  // the sizes we draw (vocab indices, episode counts), and keeping the
  // mapping trivial keeps hand-derived fixtures trivial too.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_;
};

}  // namespace affect
