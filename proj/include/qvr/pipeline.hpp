// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvr/channel.hpp"
#include "qvr/foveation.hpp"
#include "qvr/liwc.hpp"
#include "qvr/perfmodel.hpp"
#include "qvr/trace.hpp"
#include "qvr/uca.hpp"

namespace qvr {

// Frame-level simulation of the six rendering pipelines. Every mode shares
// one end-to-end composition law:
//   t_e2e = sensor + local_to_server + max(t_local, t_remote_path) + t_uca
//         + display
// with per-mode definitions of the three middle terms; reports expose each
// addend so the law can be re-checked from the outside.

enum class Mode { local_only, remote_only, static_split, ffr, dfr, qvr };

inline Mode parse_mode(const std::string& s) {
  if (s == "local_only") return Mode::local_only;
  if (s == "remote_only") return Mode::remote_only;
  if (s == "static") return Mode::static_split;
  if (s == "ffr") return Mode::ffr;
  if (s == "dfr") return Mode::dfr;
  if (s == "qvr") return Mode::qvr;
  throw std::invalid_argument("unknown mode: " + s);
}

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::local_only: return "local_only";
    case Mode::remote_only: return "remote_only";
    case Mode::static_split: return "static";
    case Mode::ffr: return "ffr";
    case Mode::dfr: return "dfr";
    case Mode::qvr: return "qvr";
  }
  return "?";
}

inline const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes = {Mode::local_only, Mode::remote_only,
                                          Mode::static_split, Mode::ffr,
                                          Mode::dfr, Mode::qvr};
  return modes;
}

struct PipelineConfig {
  DisplayConfig display;
  MarParams mar;  // resolved: omega_star > 0
  RateEstimates nominal_rates;
  ChannelProfile channel;
  UcaCostModel uca_cost;
  MotionThresholds thresholds;

  double blend_band_px = 8.0;
  double uca_overlap_fraction = 0.5;
  double sensor_latency_s = 0.002;
  double display_latency_s = 0.005;
  double cl_ls_latency_s = 0.001;  // client-to-server control message
  double mtp_budget_s = 0.025;
  double fps_target_hz = 90.0;
  double compression_ratio = 0.0436;
  double static_mispredict_threshold = 2.0;
  double e_min_deg = 5.0;
  double e_max_deg = 45.0;
  double e1_init_deg = 5.0;
  double liwc_alpha = 0.1;
  double gpu_freq_scale = 1.0;  // scales local GPU rate and GPU-hosted warp
  int warmup_frames = 50;
  int tile_size = 32;
};

inline void validate(const PipelineConfig& c) {
  validate(c.display);
  validate(c.mar);
  validate(c.nominal_rates);
  validate(c.channel);
  validate(c.uca_cost);
  validate(c.thresholds);
  if (c.blend_band_px < 0) throw std::invalid_argument("blend band must be >= 0");
  if (c.uca_overlap_fraction < 0 || c.uca_overlap_fraction > 1)
    throw std::invalid_argument("uca_overlap_fraction must be in [0, 1]");
  if (!(c.compression_ratio > 0) || c.compression_ratio > 1)
    throw std::invalid_argument("compression_ratio must be in (0, 1]");
  if (!(c.gpu_freq_scale > 0))
    throw std::invalid_argument("gpu_freq_scale must be positive");
  if (c.e_min_deg < 0 || c.e_max_deg < c.e_min_deg)
    throw std::invalid_argument("eccentricity bounds are inverted");
  if (c.e1_init_deg < c.e_min_deg || c.e1_init_deg > c.e_max_deg)
    throw std::invalid_argument("e1 init outside bounds");
  if (c.warmup_frames < 0) throw std::invalid_argument("warmup must be >= 0");
}

struct FrameReport {
  std::int64_t frame_id = 0;
  Mode mode = Mode::qvr;
  double e1_deg = 0.0;
  double e2_star_deg = 0.0;
  double t_local_s = 0.0;
  double t_remote_path_s = 0.0;
  double t_uca_s = 0.0;
  double t_e2e_s = 0.0;
  double fps_hz = 0.0;
  std::int64_t bytes_tx = 0;
  double latency_ratio = 0.0;
  bool balanced = false;
};

// The composition law every mode's report must satisfy.
inline double expected_t_e2e(const PipelineConfig& c, const FrameReport& r) {
  return c.sensor_latency_s + c.cl_ls_latency_s +
         std::max(r.t_local_s, r.t_remote_path_s) + r.t_uca_s +
         c.display_latency_s;
}

inline bool check_report_closure(const PipelineConfig& c, const FrameReport& r,
                                 double tol_s = 1e-12) {
  return std::fabs(expected_t_e2e(c, r) - r.t_e2e_s) <= tol_s;
}

struct PipelineState {
  ControllerState controller;
  bool controller_ready = false;
};

inline PipelineState make_pipeline_state(const PipelineConfig& c) {
  validate(c);
  PipelineState s;
  s.controller.e1_deg = c.e1_init_deg;
  s.controller.e_min_deg = c.e_min_deg;
  s.controller.e_max_deg = c.e_max_deg;
  s.controller.rates = c.nominal_rates;
  s.controller.rates.gpu_rate_tri_per_s *= c.gpu_freq_scale;
  return s;
}

namespace detail {

// Rendered split plus realized transfer for one frame at a given fovea size.
struct RenderOutcome {
  double e2_star_deg = 0.0;
  double fovea_fraction = 0.0;
  double t_local_s = 0.0;
  double t_remote_render_s = 0.0;
  TransmitResult tx;
  std::int64_t bytes = 0;
};

inline double local_rate(const PipelineConfig& c) {
  return c.nominal_rates.gpu_rate_tri_per_s * c.gpu_freq_scale;
}

// Warp/composition time when the work runs on the dedicated unit.
inline double warp_time_hw(const PipelineConfig& c) {
  return uca_latency(frame_tile_count(c.display, c.tile_size), c.uca_cost);
}

// The same tile workload serialized onto the GPU, which runs at the scaled
// frequency.
inline double warp_time_gpu(const PipelineConfig& c) {
  return warp_time_hw(c) / c.gpu_freq_scale;
}

inline RenderOutcome render_foveated(const PipelineConfig& c,
                                     const TraceFrame& frame, double e1_deg) {
  RenderOutcome out;
  const E2Selection sel = select_e2_star(e1_deg, c.mar, c.display);
  EccentricityState ecc;
  ecc.e1_deg = e1_deg;
  ecc.e2_star_deg = sel.e2_star_deg;
  ecc.center_x_px = frame.center_x_px;
  ecc.center_y_px = frame.center_y_px;
  const LayerGeometry geom = layer_geometry(ecc, c.mar, c.display);
  out.e2_star_deg = sel.e2_star_deg;
  out.fovea_fraction = fovea_workload_fraction(frame.scene, geom);
  out.t_local_s = static_cast<double>(frame.scene.triangles) *
                  out.fovea_fraction / local_rate(c);
  out.bytes = periphery_bytes(geom, c.display, c.compression_ratio);
  // Middle and outer layer, one stream per eye, sharing the medium.
  const std::int64_t q = out.bytes / 4;
  out.tx = transmit(c.channel, {q, q, q, out.bytes - 3 * q},
                    frame.scene.frame_id);
  out.t_remote_render_s = static_cast<double>(frame.scene.triangles) *
                          (1.0 - out.fovea_fraction) /
                          c.nominal_rates.remote_gpu_rate_tri_per_s;
  return out;
}

inline FrameReport finish_report(const PipelineConfig& c, FrameReport r,
                                 double t_gpu_stage_s, double t_net_stage_s) {
  r.t_e2e_s = expected_t_e2e(c, r);
  if (t_net_stage_s > 0)
    r.fps_hz = fps(t_gpu_stage_s, t_net_stage_s);
  else
    r.fps_hz = 1.0 / t_gpu_stage_s;
  if (r.t_local_s > 0 && r.t_remote_path_s > 0) {
    r.latency_ratio = r.t_remote_path_s / r.t_local_s;
    r.balanced = r.latency_ratio >= 0.8 && r.latency_ratio <= 1.25;
  }
  return r;
}

}  // namespace detail

// Simulate one frame. Controller state advances only in the learned modes
// (dfr, qvr); selection for frame N uses the mapping table as left by frame
// N-1 plus this frame's pre-render predictions.
inline FrameReport run_frame(const PipelineConfig& c, PipelineState& state,
                             const TraceFrame& frame, Mode mode) {
  FrameReport r;
  r.frame_id = frame.scene.frame_id;
  r.mode = mode;
  const double tri = static_cast<double>(frame.scene.triangles);

  switch (mode) {
    case Mode::local_only: {
      r.t_local_s = tri / detail::local_rate(c);
      r.t_uca_s = detail::warp_time_gpu(c);
      return detail::finish_report(c, r, r.t_local_s + r.t_uca_s, 0.0);
    }
    case Mode::remote_only: {
      const double raw = static_cast<double>(c.display.eyes) *
                         c.display.bytes_per_pixel * c.display.width_px *
                         c.display.height_px * c.compression_ratio;
      const std::int64_t bytes = static_cast<std::int64_t>(std::ceil(raw));
      const std::int64_t half = bytes / 2;
      const TransmitResult tx =
          transmit(c.channel, {half, bytes - half}, frame.scene.frame_id);
      const double remote_render =
          tri / c.nominal_rates.remote_gpu_rate_tri_per_s;
      r.t_remote_path_s = std::max(remote_render, tx.latency_s);
      r.bytes_tx = tx.bytes;
      r.t_uca_s = detail::warp_time_gpu(c);
      return detail::finish_report(c, r, r.t_uca_s, r.t_remote_path_s);
    }
    case Mode::static_split: {
      // Interactive share rendered locally; full-resolution background plus
      // 16-bit depth prefetched from the server every frame.
      const double f = frame.scene.interactive_fraction_f;
      if (f < 0 || f > 1)
        throw std::invalid_argument("interactive fraction must be in [0, 1]");
      r.t_local_s = tri * f / detail::local_rate(c);
      const double raw = static_cast<double>(c.display.eyes) *
                         (c.display.bytes_per_pixel + 2) * c.display.width_px *
                         c.display.height_px * c.compression_ratio;
      const std::int64_t bytes = static_cast<std::int64_t>(std::ceil(raw));
      const std::int64_t half = bytes / 2;
      const TransmitResult tx =
          transmit(c.channel, {half, bytes - half}, frame.scene.frame_id);
      double severity = 0.0;
      for (int i = 0; i < 6; ++i)
        severity = std::max(severity,
                            std::fabs(frame.motion.d6[i]) / c.thresholds.dof[i]);
      const bool mispredict = severity > c.static_mispredict_threshold;
      const double remote_render =
          tri * (1.0 - f) / c.nominal_rates.remote_gpu_rate_tri_per_s;
      // A correct prediction hides the whole transfer behind the previous
      // frame; a mispredict stalls for the full remote path.
      r.t_remote_path_s = mispredict ? std::max(remote_render, tx.latency_s) : 0.0;
      r.bytes_tx = tx.bytes;
      r.t_uca_s = detail::warp_time_gpu(c);
      return detail::finish_report(c, r, r.t_local_s + r.t_uca_s, tx.latency_s);
    }
    case Mode::ffr: {
      const auto out = detail::render_foveated(c, frame, c.e1_init_deg);
      r.e1_deg = c.e1_init_deg;
      r.e2_star_deg = out.e2_star_deg;
      r.t_local_s = out.t_local_s;
      r.t_remote_path_s = std::max(out.t_remote_render_s, out.tx.latency_s);
      r.bytes_tx = out.tx.bytes;
      r.t_uca_s = detail::warp_time_gpu(c);
      return detail::finish_report(c, r, r.t_local_s + r.t_uca_s,
                                   r.t_remote_path_s);
    }
    case Mode::dfr:
    case Mode::qvr: {
      ControllerState& ctrl = state.controller;
      if (!state.controller_ready) {
        // Linear prior: one degree of fovea growth is expected to add the
        // per-degree share of the initial local render estimate.
        const auto first = detail::render_foveated(c, frame, ctrl.e1_deg);
        const double t0 = std::max(first.t_local_s, 1e-6);
        ctrl.table = make_mapping_table(c.liwc_alpha, t0 / ctrl.e1_deg);
        ctrl.primed = true;
        state.controller_ready = true;
      }
      // Pre-render prediction at the current fovea size, from estimates.
      const E2Selection sel = select_e2_star(ctrl.e1_deg, c.mar, c.display);
      EccentricityState ecc{ctrl.e1_deg, sel.e2_star_deg, frame.center_x_px,
                            frame.center_y_px};
      const LayerGeometry geom = layer_geometry(ecc, c.mar, c.display);
      const double frac = fovea_workload_fraction(frame.scene, geom);
      const double t_loc_pred =
          predict_local_latency(frame.scene, frac, ctrl.rates);
      const std::int64_t bytes_pred =
          periphery_bytes(geom, c.display, c.compression_ratio);
      const double t_rem_pred = std::max(
          predict_remote_latency(bytes_pred, ctrl.rates, c.channel.overhead_s),
          tri * (1.0 - frac) / ctrl.rates.remote_gpu_rate_tri_per_s);
      const LatencyEstimate est = make_latency_estimate(t_loc_pred, t_rem_pred);

      const int idx = encode_motion(frame.motion, c.thresholds);
      const int tag = select_delta(ctrl.table, idx, est);
      const double e1_before = ctrl.e1_deg;
      apply_delta(ctrl, tag);
      // Bound clamping can truncate the step; credit the move actually taken.
      const int taken =
          static_cast<int>(std::lround(ctrl.e1_deg - e1_before));

      // Render at the stepped fovea size against the real rates and channel.
      const auto out = detail::render_foveated(c, frame, ctrl.e1_deg);
      r.e1_deg = ctrl.e1_deg;
      r.e2_star_deg = out.e2_star_deg;
      r.t_local_s = out.t_local_s;
      r.t_remote_path_s = std::max(out.t_remote_render_s, out.tx.latency_s);
      r.bytes_tx = out.tx.bytes;

      const double realized_delta = r.t_remote_path_s - r.t_local_s;
      reward_update(ctrl.table, idx, taken, est.delta_s - realized_delta);
      const double transmit_s = out.tx.transmit_component_s();
      const std::int64_t tri_fovea =
          static_cast<std::int64_t>(tri * out.fovea_fraction);
      if (r.t_local_s > 0 && transmit_s > 0 && tri_fovea > 0 && out.bytes > 0)
        ctrl.rates = update_estimates(ctrl.rates, r.t_local_s, transmit_s,
                                      tri_fovea, out.bytes);

      if (mode == Mode::qvr) {
        r.t_uca_s = (1.0 - c.uca_overlap_fraction) * detail::warp_time_hw(c);
        return detail::finish_report(c, r, r.t_local_s, r.t_remote_path_s);
      }
      r.t_uca_s = detail::warp_time_gpu(c);
      return detail::finish_report(c, r, r.t_local_s + r.t_uca_s,
                                   r.t_remote_path_s);
    }
  }
  throw std::logic_error("unreachable mode");
}

struct RunSummary {
  Mode mode = Mode::qvr;
  std::string preset;
  std::string network;
  double gpu_freq_scale = 1.0;
  int frames = 0;
  int warmup_frames = 0;
  double mean_e1_deg = 0.0;
  double mean_t_e2e_s = 0.0;
  double p50_t_e2e_s = 0.0;
  double p95_t_e2e_s = 0.0;
  double p99_t_e2e_s = 0.0;
  double mean_fps_hz = 0.0;
  double mean_latency_ratio = 0.0;
  double balanced_fraction = 0.0;
  std::int64_t total_bytes = 0;
  bool feasible = false;  // mean fps meets the target
};

struct RunResult {
  std::vector<FrameReport> reports;
  RunSummary summary;
};

inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile of empty set");
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double f = pos - lo;
  return v[lo] * (1.0 - f) + v[hi] * f;
}

// Aggregate over the post-warmup window (bytes accumulate over all frames).
inline RunSummary summarize_reports(const PipelineConfig& c,
                                    const std::vector<FrameReport>& reports,
                                    Mode mode, const std::string& preset) {
  if (reports.empty()) throw std::invalid_argument("no reports to summarize");
  RunSummary s;
  s.mode = mode;
  s.preset = preset;
  s.network = c.channel.name;
  s.gpu_freq_scale = c.gpu_freq_scale;
  s.frames = static_cast<int>(reports.size());
  s.warmup_frames = std::min<int>(c.warmup_frames, s.frames - 1);
  std::vector<double> e2e;
  int n = 0, balanced = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const FrameReport& r = reports[i];
    s.total_bytes += r.bytes_tx;
    if (static_cast<int>(i) < s.warmup_frames) continue;
    ++n;
    s.mean_e1_deg += r.e1_deg;
    s.mean_t_e2e_s += r.t_e2e_s;
    s.mean_fps_hz += r.fps_hz;
    s.mean_latency_ratio += r.latency_ratio;
    if (r.balanced) ++balanced;
    e2e.push_back(r.t_e2e_s);
  }
  s.mean_e1_deg /= n;
  s.mean_t_e2e_s /= n;
  s.mean_fps_hz /= n;
  s.mean_latency_ratio /= n;
  s.balanced_fraction = static_cast<double>(balanced) / n;
  s.p50_t_e2e_s = percentile(e2e, 0.50);
  s.p95_t_e2e_s = percentile(e2e, 0.95);
  s.p99_t_e2e_s = percentile(e2e, 0.99);
  s.feasible = s.mean_fps_hz >= c.fps_target_hz;
  return s;
}

inline RunResult run_trace(const PipelineConfig& c, const Trace& trace,
                           Mode mode) {
  validate(c);
  if (trace.frames.empty()) throw std::invalid_argument("trace has no frames");
  PipelineState state = make_pipeline_state(c);
  RunResult out;
  out.reports.reserve(trace.frames.size());
  for (const TraceFrame& fr : trace.frames)
    out.reports.push_back(run_frame(c, state, fr, mode));
  out.summary = summarize_reports(c, out.reports, mode, trace.preset_name);
  return out;
}

struct ModeComparison {
  std::vector<RunResult> runs;  // one per mode, in all_modes() order

  const RunResult& by_mode(Mode m) const {
    for (const auto& r : runs)
      if (r.summary.mode == m) return r;
    throw std::invalid_argument("mode missing from comparison");
  }

  double speedup_vs_local(Mode m) const {
    return by_mode(Mode::local_only).summary.mean_t_e2e_s /
           by_mode(m).summary.mean_t_e2e_s;
  }

  double bytes_vs_remote(Mode m) const {
    const double base =
        static_cast<double>(by_mode(Mode::remote_only).summary.total_bytes);
    return static_cast<double>(by_mode(m).summary.total_bytes) / base;
  }
};

inline ModeComparison compare_modes(const PipelineConfig& c,
                                    const Trace& trace) {
  ModeComparison out;
  for (Mode m : all_modes()) out.runs.push_back(run_trace(c, trace, m));
  return out;
}

}  // namespace qvr
