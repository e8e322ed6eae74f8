// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvr/rng.hpp"

namespace qvr {

// Modeled downlink. Streams within a frame share the medium, so a frame's
// transmit time depends only on the byte total; jitter is a deterministic
// function of (seed, frame_id) so reruns are byte-identical.

struct ChannelProfile {
  std::string name = "wifi";
  double throughput_bps = 2.0e8;
  double snr_db = 20.0;
  double overhead_s = 0.0093;  // fixed per-frame protocol cost
  std::uint64_t seed = 1;
};

inline void validate(const ChannelProfile& p) {
  if (!(p.throughput_bps > 0))
    throw std::invalid_argument("throughput must be positive");
  if (p.overhead_s < 0)
    throw std::invalid_argument("overhead must be non-negative");
}

// Built-in profiles. The wifi overhead is anchored to measured
// full-background transfers; the cellular and mmWave overheads reflect their
// relative link setup costs.
inline ChannelProfile wifi_profile(std::uint64_t seed = 1) {
  return {"wifi", 2.0e8, 20.0, 0.0093, seed};
}
inline ChannelProfile lte4g_profile(std::uint64_t seed = 1) {
  return {"lte4g", 1.0e8, 20.0, 0.0200, seed};
}
inline ChannelProfile early5g_profile(std::uint64_t seed = 1) {
  return {"early5g", 5.0e8, 20.0, 0.0015, seed};
}

inline ChannelProfile named_profile(const std::string& name,
                                    std::uint64_t seed = 1) {
  if (name == "wifi") return wifi_profile(seed);
  if (name == "lte4g") return lte4g_profile(seed);
  if (name == "early5g") return early5g_profile(seed);
  throw std::invalid_argument("unknown channel profile: " + name);
}

// Noise scale derived from the signal-to-noise ratio: 20 dB gives 0.1.
inline double snr_sigma(const ChannelProfile& p) {
  return std::pow(10.0, -p.snr_db / 20.0);
}

namespace detail {
constexpr std::uint64_t kChannelStream = 0xc4a11e1u;
}

// Per-frame throughput after SNR jitter: nominal * (1 + n) with
// n ~ N(0, sigma), the factor clamped to [0.5, 1.5].
inline double effective_throughput(const ChannelProfile& p,
                                   std::int64_t frame_id) {
  validate(p);
  const double sigma = snr_sigma(p);
  const double n = gaussian(p.seed, detail::kChannelStream,
                            static_cast<std::uint64_t>(frame_id));
  const double factor = std::clamp(1.0 + sigma * n, 0.5, 1.5);
  return p.throughput_bps * factor;
}

struct TransmitResult {
  std::int64_t bytes = 0;
  double latency_s = 0.0;
  double effective_throughput_bps = 0.0;

  double transmit_component_s() const {
    return 8.0 * static_cast<double>(bytes) / effective_throughput_bps;
  }
};

// Send a set of parallel streams in one frame slot.
inline TransmitResult transmit(const ChannelProfile& p,
                               const std::vector<std::int64_t>& stream_bytes,
                               std::int64_t frame_id) {
  validate(p);
  std::int64_t total = 0;
  for (std::int64_t b : stream_bytes) {
    if (b < 0) throw std::invalid_argument("stream bytes must be non-negative");
    total += b;
  }
  TransmitResult r;
  r.bytes = total;
  r.effective_throughput_bps = effective_throughput(p, frame_id);
  r.latency_s =
      p.overhead_s + 8.0 * static_cast<double>(total) / r.effective_throughput_bps;
  return r;
}

}  // namespace qvr
