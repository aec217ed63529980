// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_RNG_HPP
#define REVCAL_CORE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace revcal {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the n-th draw is a pure function of
/// (seed, stream, substream, n), so results never depend on evaluation order
/// or thread scheduling. Distributions are implemented here rather than taken
/// from <random>, whose distribution algorithms are implementation-defined.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
      : key_(mix64(seed ^ mix64(stream * 0x9e3779b97f4a7c15ULL + mix64(substream + 1)))) {}

  std::uint64_t next_u64() { return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t x = next_u64();
      // reject the short final block so every residue is equally likely
      if (x >= limit) return x % bound;
    }
  }

  /// Standard normal via Box-Muller (one of the pair is discarded so the
  /// draw count per call is fixed).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace revcal

#endif  // REVCAL_CORE_RNG_HPP
