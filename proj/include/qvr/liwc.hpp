// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qvr/half.hpp"
#include "qvr/perfmodel.hpp"

namespace qvr {

// Lightweight controller that retargets the fovea size once per frame from
// quantized motion and the predicted local/remote latency gap. All learned
// state lives in a fixed-size table of half-precision entries so the whole
// controller fits in a few tens of kilobytes.

struct MotionSample {
  // Six degree-of-freedom head delta for the frame:
  // translation x/y/z (metres), then roll/pitch/yaw (degrees).
  std::array<double, 6> d6{};
  double gaze_dx_px = 0.0;
  double gaze_dy_px = 0.0;
};

struct MotionThresholds {
  std::array<double, 6> dof{0.01, 0.01, 0.01, 0.5, 0.5, 0.5};
  double gaze_mag_px = 8.0;  // base width of the gaze magnitude buckets
};

inline void validate(const MotionThresholds& t) {
  for (double v : t.dof)
    if (!(v > 0)) throw std::invalid_argument("dof thresholds must be positive");
  if (!(t.gaze_mag_px > 0))
    throw std::invalid_argument("gaze threshold must be positive");
}

constexpr int kMotionCodeCount = 1024;  // 10-bit motion code
constexpr int kDeltaTagMin = -5;
constexpr int kDeltaTagMax = 5;
constexpr int kDeltaTagCount = kDeltaTagMax - kDeltaTagMin + 1;  // 11
constexpr int kTagStride = 32;  // tag row padded to a power of two
constexpr int kTableDepth = kMotionCodeCount * kTagStride;  // 2^15 slots

// 10-bit motion code:
//   bits 0..5  one per DoF, set when |delta| exceeds its threshold
//   bits 6..7  gaze magnitude bucket (<= g, <= 2g, <= 4g, > 4g)
//   bits 8..9  gaze direction quadrant (+x+y, -x+y, -x-y, +x-y)
// Zero motion therefore encodes to 0.
inline int encode_motion(const MotionSample& s, const MotionThresholds& thr) {
  validate(thr);
  int code = 0;
  for (int i = 0; i < 6; ++i)
    if (std::fabs(s.d6[i]) > thr.dof[i]) code |= 1 << i;

  const double mag = std::hypot(s.gaze_dx_px, s.gaze_dy_px);
  int bucket;
  if (mag <= thr.gaze_mag_px)
    bucket = 0;
  else if (mag <= 2.0 * thr.gaze_mag_px)
    bucket = 1;
  else if (mag <= 4.0 * thr.gaze_mag_px)
    bucket = 2;
  else
    bucket = 3;
  code |= bucket << 6;

  int quadrant;
  if (s.gaze_dx_px >= 0)
    quadrant = (s.gaze_dy_px >= 0) ? 0 : 3;
  else
    quadrant = (s.gaze_dy_px >= 0) ? 1 : 2;
  code |= quadrant << 8;
  return code;
}

inline int table_slot(int motion_code, int delta_tag) {
  if (motion_code < 0 || motion_code >= kMotionCodeCount)
    throw std::out_of_range("motion code out of range");
  if (delta_tag < kDeltaTagMin || delta_tag > kDeltaTagMax)
    throw std::out_of_range("delta tag out of range");
  return motion_code * kTagStride + (delta_tag - kDeltaTagMin);
}

// Learned latency-gradient offsets, one per (motion code, delta tag), stored
// in half precision. Slot values are seconds of latency gap.
struct MappingTable {
  std::vector<std::uint16_t> entries;  // kTableDepth halves
  std::vector<std::uint32_t> visits;   // update counts, same layout
  double alpha = 0.1;

  float get(int motion_code, int delta_tag) const {
    return half_to_float(entries[table_slot(motion_code, delta_tag)]);
  }

  void set(int motion_code, int delta_tag, float value_s) {
    entries[table_slot(motion_code, delta_tag)] = float_to_half(value_s);
  }
};

// Prime every row with a linear prior: the entry for tag d anticipates a
// latency gap of gradient_s_per_deg * d, so the first lookups already step
// toward the balance point instead of tie-breaking to zero.
inline MappingTable make_mapping_table(double alpha,
                                       double gradient_s_per_deg) {
  if (!(alpha > 0) || alpha > 1)
    throw std::invalid_argument("alpha must be in (0, 1]");
  if (!(gradient_s_per_deg > 0))
    throw std::invalid_argument("prior gradient must be positive");
  MappingTable t;
  t.alpha = alpha;
  t.entries.assign(kTableDepth, 0);
  t.visits.assign(kTableDepth, 0);
  for (int code = 0; code < kMotionCodeCount; ++code)
    for (int tag = kDeltaTagMin; tag <= kDeltaTagMax; ++tag)
      t.set(code, tag, static_cast<float>(gradient_s_per_deg * tag));
  return t;
}

// Tag whose stored offset lies closest to the estimated latency gap, i.e.
// the step expected to close most of the gap. Ties prefer the smaller |tag|,
// then the negative one.
inline int select_delta(const MappingTable& table, int motion_code,
                        const LatencyEstimate& est) {
  if (table.entries.size() != kTableDepth)
    throw std::invalid_argument("mapping table not initialised");
  int best_tag = 0;
  double best_err = 0.0;
  bool first = true;
  for (int mag = 0; mag <= kDeltaTagMax; ++mag) {
    for (int sign = 0; sign < (mag == 0 ? 1 : 2); ++sign) {
      const int tag = (sign == 0) ? -mag : mag;
      const double err =
          std::fabs(static_cast<double>(table.get(motion_code, tag)) -
                    est.delta_s);
      if (first || err < best_err) {
        best_tag = tag;
        best_err = err;
        first = false;
      }
    }
  }
  return best_tag;
}

// Blend a measurement into the chosen entry. Callers pass the latency gap
// the step actually closed (gap before minus gap after), so each entry
// converges to the gap its tag is good for and the zero tag stays pinned
// near zero instead of absorbing whatever gap is current.
inline void reward_update(MappingTable& table, int motion_code, int delta_tag,
                          double closed_gap_s) {
  const int slot = table_slot(motion_code, delta_tag);
  const double prev = half_to_float(table.entries[slot]);
  const double next = (1.0 - table.alpha) * prev + table.alpha * closed_gap_s;
  table.entries[slot] = float_to_half(static_cast<float>(next));
  ++table.visits[slot];
}

struct ControllerState {
  MappingTable table;
  RateEstimates rates;
  double e1_deg = 5.0;
  double e_min_deg = 5.0;
  double e_max_deg = 45.0;
  bool primed = false;
};

// Apply a tag to the fovea size, clamped to the configured bounds.
inline double apply_delta(ControllerState& state, int delta_tag) {
  if (delta_tag < kDeltaTagMin || delta_tag > kDeltaTagMax)
    throw std::out_of_range("delta tag out of range");
  state.e1_deg = std::min(state.e_max_deg,
                          std::max(state.e_min_deg, state.e1_deg + delta_tag));
  return state.e1_deg;
}

}  // namespace qvr
