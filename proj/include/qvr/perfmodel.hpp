// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qvr {

// Screen-space workload density, sampled on a coarse grid over the display
// rectangle. Coordinates are resolution-independent: cell (i, j) covers
// [i/cols, (i+1)/cols) x [j/rows, (j+1)/rows) of the display. Cell values are
// non-negative and, for a valid scene, sum to 1.
struct DensityField {
  int cols = 0;
  int rows = 0;
  std::vector<double> cells;  // row-major, rows * cols entries

  double at(int i, int j) const { return cells[static_cast<std::size_t>(j) * cols + i]; }

  double sum() const {
    double s = 0;
    for (double c : cells) s += c;
    return s;
  }

  bool normalized(double tol = 1e-9) const {
    for (double c : cells)
      if (!(c >= 0)) return false;
    return std::fabs(sum() - 1.0) <= tol;
  }
};

// One frame of workload as seen by the latency predictors. The density field
// is shared between frames of a trace; interactive_fraction_f is the share of
// the workload tied to interactive objects (used by the static-split
// baseline only).
struct SceneFrame {
  std::int64_t frame_id = 0;
  std::int64_t triangles = 0;
  std::shared_ptr<const DensityField> density;
  double interactive_fraction_f = 0.0;
};

// Exponentially smoothed estimates of the three rates the predictors need.
struct RateEstimates {
  double gpu_rate_tri_per_s = 0.0;
  double remote_gpu_rate_tri_per_s = 0.0;
  double throughput_bps = 0.0;
  double alpha = 0.1;
};

inline void validate(const RateEstimates& r) {
  if (!(r.gpu_rate_tri_per_s > 0) || !(r.remote_gpu_rate_tri_per_s > 0) ||
      !(r.throughput_bps > 0))
    throw std::invalid_argument("rate estimates must be positive");
  if (!(r.alpha > 0) || r.alpha > 1)
    throw std::invalid_argument("alpha must be in (0, 1]");
}

struct LatencyEstimate {
  double t_local_s = 0.0;
  double t_remote_s = 0.0;
  double delta_s = 0.0;  // t_remote_s - t_local_s
};

// Local render time: triangles inside the fovea divided by the GPU's
// triangle throughput.
inline double predict_local_latency(const SceneFrame& scene,
                                    double fovea_fraction,
                                    const RateEstimates& rates) {
  if (scene.triangles < 0)
    throw std::invalid_argument("triangle count must be non-negative");
  if (!(fovea_fraction >= 0.0) || fovea_fraction > 1.0)
    throw std::invalid_argument("fovea_fraction must be in [0, 1]");
  if (!(rates.gpu_rate_tri_per_s > 0))
    throw std::invalid_argument("gpu rate must be positive");
  return static_cast<double>(scene.triangles) * fovea_fraction /
         rates.gpu_rate_tri_per_s;
}

// Transmit time for a payload plus a fixed per-frame protocol overhead.
inline double predict_remote_latency(std::int64_t bytes,
                                     const RateEstimates& rates,
                                     double overhead_s = 0.0) {
  if (bytes < 0) throw std::invalid_argument("byte count must be non-negative");
  if (!(rates.throughput_bps > 0))
    throw std::invalid_argument("throughput must be positive");
  if (overhead_s < 0) throw std::invalid_argument("overhead must be non-negative");
  return overhead_s + 8.0 * static_cast<double>(bytes) / rates.throughput_bps;
}

inline LatencyEstimate make_latency_estimate(double t_local_s,
                                             double t_remote_s) {
  return {t_local_s, t_remote_s, t_remote_s - t_local_s};
}

// Frame rate is bounded by the slower of the GPU and network stages.
inline double fps(double t_gpu_s, double t_network_s) {
  if (!(t_gpu_s > 0) || !(t_network_s > 0))
    throw std::invalid_argument("stage times must be positive");
  return std::min(1.0 / t_gpu_s, 1.0 / t_network_s);
}

// Fold one frame's measurements into the rate estimates.
// measured_transmit_s is the pure transmit component, without the per-frame
// overhead, so the smoothed value tracks effective link throughput.
inline RateEstimates update_estimates(const RateEstimates& rates,
                                      double measured_local_s,
                                      double measured_transmit_s,
                                      std::int64_t triangles_rendered,
                                      std::int64_t bytes_sent) {
  validate(rates);
  if (!(measured_local_s > 0) || !(measured_transmit_s > 0))
    throw std::invalid_argument("measured times must be positive");
  if (triangles_rendered <= 0 || bytes_sent <= 0)
    throw std::invalid_argument("measured amounts must be positive");
  RateEstimates out = rates;
  const double a = rates.alpha;
  out.gpu_rate_tri_per_s =
      (1.0 - a) * rates.gpu_rate_tri_per_s +
      a * static_cast<double>(triangles_rendered) / measured_local_s;
  out.throughput_bps =
      (1.0 - a) * rates.throughput_bps +
      a * 8.0 * static_cast<double>(bytes_sent) / measured_transmit_s;
  return out;
}

}  // namespace qvr
