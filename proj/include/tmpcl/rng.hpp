#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tmp {

// Deterministic random source built on std::mt19937_64. All derived draws
// (uniform doubles, gaussians, bounded integers, shuffles) are implemented
// from the raw 64-bit stream, so a given seed yields the same sequence on
// every platform. The std distribution classes are avoided on purpose:
// their output is implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (polar form avoided to keep the
  // draw count per call fixed).
  double normal();

  // Uniform integer in [0, n). Rejection sampling, bias free.
  std::size_t uniform_index(std::size_t n);

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tmp
