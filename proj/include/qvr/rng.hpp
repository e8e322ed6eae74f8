// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace qvr {

// Counter-based deterministic random primitives. All randomness in the
// simulator flows through these so that a (seed, stream, counter) triple
// yields the same value on every platform; std::normal_distribution and
// friends are implementation-defined and would break byte-identical reruns.

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix3(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t counter) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
  return static_cast<double>(mix3(seed, stream, counter) >> 11) *
         (1.0 / 9007199254740992.0);
}

// Uniform in [lo, hi).
inline double uniform_range(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t counter, double lo, double hi) {
  return lo + (hi - lo) * uniform01(seed, stream, counter);
}

// Standard normal via Box-Muller; one draw per counter value.
inline double gaussian(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t counter) {
  // u1 must be > 0 for the log.
  const double u1 =
      (static_cast<double>(mix3(seed, stream, counter * 2) >> 11) + 1.0) *
      (1.0 / 9007199254740992.0);
  const double u2 = uniform01(seed, stream, counter * 2 + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Sequential generator for test-side case generation.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace qvr
