// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvr/channel.hpp"
#include "qvr/liwc.hpp"
#include "qvr/pipeline.hpp"
#include "qvr/trace.hpp"

namespace qvr {

// Experiment configuration and artifact persistence. JSON documents carry a
// "schema" tag so downstream readers can reject files they do not understand.

inline constexpr const char* kConfigSchema = "qvr.config.v1";
inline constexpr const char* kSweepSchema = "qvr.sweep.v1";
inline constexpr const char* kTableSchema = "qvr.liwc-table.v1";

struct SimConfig {
  DisplayConfig display;
  MarParams mar;
  MotionThresholds thresholds;
  UcaCostModel uca_cost;
  double local_gpu_rate_tri_per_s = 0.0;  // 0 means calibrate from presets
  double remote_gpu_ratio = 40.0;
  double blend_band_px = 8.0;
  double uca_overlap_fraction = 0.5;
  double sensor_latency_s = 0.002;
  double display_latency_s = 0.005;
  double cl_ls_latency_s = 0.001;
  double mtp_budget_s = 0.025;
  double fps_target_hz = 90.0;
  double compression_ratio = 0.0436;
  double static_mispredict_threshold = 2.0;
  double e_min_deg = 5.0;
  double e_max_deg = 45.0;
  double e1_init_deg = 5.0;
  double liwc_alpha = 0.1;
  int warmup_frames = 50;
  int tile_size = 32;
};

struct SweepSpec {
  std::vector<std::string> presets;
  std::vector<std::string> networks;
  std::vector<double> gpu_freq_scales;  // 1.0 = reference clock
  std::vector<std::string> modes;
  int frames = 300;
  std::uint64_t seed = 1;
};

namespace detail {

inline double jnum(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw std::invalid_argument(std::string("config field not numeric: ") + key);
  return j[key].get<double>();
}

inline int jint(const nlohmann::json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw std::invalid_argument(std::string("config field not integral: ") + key);
  return j[key].get<int>();
}

}  // namespace detail

inline nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j;
  j["schema"] = kConfigSchema;
  j["display"] = {{"width_px", c.display.width_px},
                  {"height_px", c.display.height_px},
                  {"hfov_deg", c.display.horizontal_fov_deg},
                  {"bytes_per_pixel", c.display.bytes_per_pixel},
                  {"eyes", c.display.eyes}};
  j["acuity"] = {{"slope_m", c.mar.m},
                 {"intercept_omega0", c.mar.omega0},
                 {"omega_star", c.mar.omega_star}};
  j["motion_thresholds"] = {{"dx_m", c.thresholds.dof[0]},
                            {"dy_m", c.thresholds.dof[1]},
                            {"dz_m", c.thresholds.dof[2]},
                            {"droll_deg", c.thresholds.dof[3]},
                            {"dpitch_deg", c.thresholds.dof[4]},
                            {"dyaw_deg", c.thresholds.dof[5]},
                            {"gaze_mag_px", c.thresholds.gaze_mag_px}};
  j["uca"] = {{"cycles_per_tile", c.uca_cost.cycles_per_tile},
              {"parallel_units", c.uca_cost.units},
              {"clock_hz", c.uca_cost.freq_hz},
              {"tile_size", c.tile_size},
              {"blend_band_px", c.blend_band_px},
              {"overlap_fraction", c.uca_overlap_fraction}};
  j["rates"] = {{"local_gpu_tri_per_s", c.local_gpu_rate_tri_per_s},
                {"remote_gpu_ratio", c.remote_gpu_ratio}};
  j["pipeline"] = {{"sensor_latency_s", c.sensor_latency_s},
                   {"display_latency_s", c.display_latency_s},
                   {"cl_ls_latency_s", c.cl_ls_latency_s},
                   {"mtp_budget_s", c.mtp_budget_s},
                   {"fps_target_hz", c.fps_target_hz},
                   {"compression_ratio", c.compression_ratio},
                   {"static_mispredict_threshold", c.static_mispredict_threshold},
                   {"warmup_frames", c.warmup_frames}};
  j["controller"] = {{"e_min_deg", c.e_min_deg},
                     {"e_max_deg", c.e_max_deg},
                     {"e1_init_deg", c.e1_init_deg},
                     {"alpha", c.liwc_alpha}};
  return j;
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  using detail::jint;
  using detail::jnum;
  if (j.contains("schema") && j["schema"] != kConfigSchema)
    throw std::invalid_argument("unexpected config schema: " +
                                j["schema"].get<std::string>());
  SimConfig c;
  if (j.contains("display")) {
    const auto& d = j["display"];
    c.display.width_px = jint(d, "width_px", c.display.width_px);
    c.display.height_px = jint(d, "height_px", c.display.height_px);
    c.display.horizontal_fov_deg = jnum(d, "hfov_deg", c.display.horizontal_fov_deg);
    c.display.bytes_per_pixel = jint(d, "bytes_per_pixel", c.display.bytes_per_pixel);
    c.display.eyes = jint(d, "eyes", c.display.eyes);
  }
  if (j.contains("acuity")) {
    const auto& a = j["acuity"];
    c.mar.m = jnum(a, "slope_m", c.mar.m);
    c.mar.omega0 = jnum(a, "intercept_omega0", c.mar.omega0);
    c.mar.omega_star = jnum(a, "omega_star", c.mar.omega_star);
  }
  if (j.contains("motion_thresholds")) {
    const auto& t = j["motion_thresholds"];
    c.thresholds.dof[0] = jnum(t, "dx_m", c.thresholds.dof[0]);
    c.thresholds.dof[1] = jnum(t, "dy_m", c.thresholds.dof[1]);
    c.thresholds.dof[2] = jnum(t, "dz_m", c.thresholds.dof[2]);
    c.thresholds.dof[3] = jnum(t, "droll_deg", c.thresholds.dof[3]);
    c.thresholds.dof[4] = jnum(t, "dpitch_deg", c.thresholds.dof[4]);
    c.thresholds.dof[5] = jnum(t, "dyaw_deg", c.thresholds.dof[5]);
    c.thresholds.gaze_mag_px = jnum(t, "gaze_mag_px", c.thresholds.gaze_mag_px);
  }
  if (j.contains("uca")) {
    const auto& u = j["uca"];
    c.uca_cost.cycles_per_tile = jnum(u, "cycles_per_tile", c.uca_cost.cycles_per_tile);
    c.uca_cost.units = jint(u, "parallel_units", c.uca_cost.units);
    c.uca_cost.freq_hz = jnum(u, "clock_hz", c.uca_cost.freq_hz);
    c.tile_size = jint(u, "tile_size", c.tile_size);
    c.blend_band_px = jnum(u, "blend_band_px", c.blend_band_px);
    c.uca_overlap_fraction = jnum(u, "overlap_fraction", c.uca_overlap_fraction);
  }
  if (j.contains("rates")) {
    const auto& rj = j["rates"];
    c.local_gpu_rate_tri_per_s = jnum(rj, "local_gpu_tri_per_s", 0.0);
    c.remote_gpu_ratio = jnum(rj, "remote_gpu_ratio", c.remote_gpu_ratio);
  }
  if (j.contains("pipeline")) {
    const auto& p = j["pipeline"];
    c.sensor_latency_s = jnum(p, "sensor_latency_s", c.sensor_latency_s);
    c.display_latency_s = jnum(p, "display_latency_s", c.display_latency_s);
    c.cl_ls_latency_s = jnum(p, "cl_ls_latency_s", c.cl_ls_latency_s);
    c.mtp_budget_s = jnum(p, "mtp_budget_s", c.mtp_budget_s);
    c.fps_target_hz = jnum(p, "fps_target_hz", c.fps_target_hz);
    c.compression_ratio = jnum(p, "compression_ratio", c.compression_ratio);
    c.static_mispredict_threshold =
        jnum(p, "static_mispredict_threshold", c.static_mispredict_threshold);
    c.warmup_frames = jint(p, "warmup_frames", c.warmup_frames);
  }
  if (j.contains("controller")) {
    const auto& k = j["controller"];
    c.e_min_deg = jnum(k, "e_min_deg", c.e_min_deg);
    c.e_max_deg = jnum(k, "e_max_deg", c.e_max_deg);
    c.e1_init_deg = jnum(k, "e1_init_deg", c.e1_init_deg);
    c.liwc_alpha = jnum(k, "alpha", c.liwc_alpha);
  }
  return c;
}

inline SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return sim_config_from_json(j);
}

inline void save_sim_config(const SimConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << to_json(c).dump(2) << "\n";
}

inline nlohmann::json to_json(const SweepSpec& s) {
  nlohmann::json j;
  j["schema"] = kSweepSchema;
  j["presets"] = s.presets;
  j["networks"] = s.networks;
  j["gpu_freq_scales"] = s.gpu_freq_scales;
  j["modes"] = s.modes;
  j["frames"] = s.frames;
  j["seed"] = s.seed;
  return j;
}

inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  if (j.contains("schema") && j["schema"] != kSweepSchema)
    throw std::invalid_argument("unexpected sweep schema: " +
                                j["schema"].get<std::string>());
  SweepSpec s;
  if (j.contains("presets")) s.presets = j["presets"].get<std::vector<std::string>>();
  if (j.contains("networks")) s.networks = j["networks"].get<std::vector<std::string>>();
  if (j.contains("gpu_freq_scales"))
    s.gpu_freq_scales = j["gpu_freq_scales"].get<std::vector<double>>();
  if (j.contains("modes")) s.modes = j["modes"].get<std::vector<std::string>>();
  s.frames = detail::jint(j, "frames", s.frames);
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (s.presets.empty()) throw std::invalid_argument("sweep lists no presets");
  if (s.networks.empty()) throw std::invalid_argument("sweep lists no networks");
  if (s.gpu_freq_scales.empty())
    throw std::invalid_argument("sweep lists no gpu_freq_scales");
  if (s.modes.empty()) throw std::invalid_argument("sweep lists no modes");
  if (s.frames <= 0) throw std::invalid_argument("sweep frame count must be > 0");
  return s;
}

inline SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep spec: " + path);
  nlohmann::json j;
  in >> j;
  return sweep_spec_from_json(j);
}

// Materialize a per-run pipeline configuration. A zero local GPU rate in the
// base config is replaced with the rate calibrated so the heaviest preset
// fits an 11 ms frame at a 15 degree fovea.
inline PipelineConfig to_pipeline_config(const SimConfig& base,
                                         const AppPreset& preset,
                                         const std::string& network,
                                         double gpu_freq_scale,
                                         std::uint64_t seed) {
  PipelineConfig c;
  c.display = preset.display();
  c.mar = base.mar;
  c.mar.omega_star = resolve_mar(base.mar, c.display).omega_star;
  double rate = base.local_gpu_rate_tri_per_s;
  if (rate <= 0) rate = calibrate_gpu_rate(app_presets());
  c.nominal_rates.gpu_rate_tri_per_s = rate;
  c.nominal_rates.remote_gpu_rate_tri_per_s = rate * base.remote_gpu_ratio;
  c.channel = named_profile(network, seed);
  c.nominal_rates.throughput_bps = c.channel.throughput_bps;
  c.nominal_rates.alpha = base.liwc_alpha;
  c.uca_cost = base.uca_cost;
  c.thresholds = base.thresholds;
  c.blend_band_px = base.blend_band_px;
  c.uca_overlap_fraction = base.uca_overlap_fraction;
  c.sensor_latency_s = base.sensor_latency_s;
  c.display_latency_s = base.display_latency_s;
  c.cl_ls_latency_s = base.cl_ls_latency_s;
  c.mtp_budget_s = base.mtp_budget_s;
  c.fps_target_hz = base.fps_target_hz;
  c.compression_ratio = base.compression_ratio;
  c.static_mispredict_threshold = base.static_mispredict_threshold;
  c.e_min_deg = base.e_min_deg;
  c.e_max_deg = base.e_max_deg;
  c.e1_init_deg = base.e1_init_deg;
  c.liwc_alpha = base.liwc_alpha;
  c.gpu_freq_scale = gpu_freq_scale;
  c.warmup_frames = base.warmup_frames;
  c.tile_size = base.tile_size;
  validate(c);
  return c;
}

// Mapping table persistence: raw little-endian entries next to a JSON sidecar
// recording the knobs the table was trained under.
inline void save_mapping_table(const MappingTable& t,
                               const MotionThresholds& thr,
                               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write table: " + path);
  for (std::uint16_t v : t.entries) {
    const char bytes[2] = {static_cast<char>(v & 0xff),
                           static_cast<char>((v >> 8) & 0xff)};
    out.write(bytes, 2);
  }
  nlohmann::json j;
  j["schema"] = kTableSchema;
  j["alpha"] = t.alpha;
  j["entries"] = t.entries.size();
  j["thresholds"] = {{"dx_m", thr.dof[0]},       {"dy_m", thr.dof[1]},
                     {"dz_m", thr.dof[2]},       {"droll_deg", thr.dof[3]},
                     {"dpitch_deg", thr.dof[4]}, {"dyaw_deg", thr.dof[5]},
                     {"gaze_mag_px", thr.gaze_mag_px}};
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("cannot write table sidecar: " + path);
  side << j.dump(2) << "\n";
}

inline MappingTable load_mapping_table(const std::string& path) {
  std::ifstream side_in(path + ".json");
  if (!side_in) throw std::runtime_error("cannot open table sidecar: " + path);
  nlohmann::json j;
  side_in >> j;
  if (!j.contains("schema") || j["schema"] != kTableSchema)
    throw std::invalid_argument("unexpected table schema in sidecar");
  MappingTable t;
  t.alpha = j["alpha"].get<double>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open table: " + path);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (raw.size() != 2 * kTableDepth)
    throw std::runtime_error("table has wrong size: " + path);
  t.entries.resize(kTableDepth);
  t.visits.assign(kTableDepth, 0);
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto lo = static_cast<unsigned char>(raw[2 * i]);
    const auto hi = static_cast<unsigned char>(raw[2 * i + 1]);
    t.entries[i] = static_cast<std::uint16_t>(lo | (hi << 8));
  }
  return t;
}

}  // namespace qvr
