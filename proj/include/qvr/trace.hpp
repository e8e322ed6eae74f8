// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvr/foveation.hpp"
#include "qvr/liwc.hpp"
#include "qvr/perfmodel.hpp"
#include "qvr/rng.hpp"

namespace qvr {

enum class MotionModel { still, pan, saccade_mix };

inline MotionModel parse_motion_model(const std::string& s) {
  if (s == "still") return MotionModel::still;
  if (s == "pan") return MotionModel::pan;
  if (s == "saccade-mix" || s == "saccade_mix") return MotionModel::saccade_mix;
  throw std::invalid_argument("unknown motion model: " + s);
}

inline const char* to_string(MotionModel m) {
  switch (m) {
    case MotionModel::still: return "still";
    case MotionModel::pan: return "pan";
    case MotionModel::saccade_mix: return "saccade-mix";
  }
  return "?";
}

// Synthetic application workload. Triangle budget and the radial complexity
// profile are calibration constants: the profile weight at screen radius r
// degrees is floor + (1 + r/r0)^-p, which concentrates geometry toward the
// screen centre the way the measured workloads do.
struct AppPreset {
  std::string name;
  int width_px = 1920;
  int height_px = 2160;
  double hfov_deg = 120.0;
  std::int64_t triangles = 0;
  double f_min = 0.1;  // interactive-object share of the workload
  double f_max = 0.2;
  double density_floor = 0.25;
  double density_p = 1.0;
  double density_r0_deg = 8.0;
  MotionModel default_motion = MotionModel::still;

  DisplayConfig display() const {
    DisplayConfig d;
    d.width_px = width_px;
    d.height_px = height_px;
    d.horizontal_fov_deg = hfov_deg;
    return d;
  }

  double density_weight(double r_deg) const {
    return density_floor + std::pow(1.0 + r_deg / density_r0_deg, -density_p);
  }
};

// Workload family. The first five mirror published static foveated-transfer
// measurements; the rest are the interactive benchmark set used for the
// balance sweeps. Triangle budgets and density shapes for the benchmark set
// are calibrated against the published mean fovea sizes.
inline const std::vector<AppPreset>& app_presets() {
  static const std::vector<AppPreset> presets = {
      // name        w     h     hfov  triangles  f_min  f_max  floor  p     r0    motion
      {"foveated3d", 1920, 2160, 120.0, 231000,   0.16,  0.52,  0.0,   3.0,  6.0,  MotionModel::still},
      {"viking",     1920, 2160, 120.0, 2800000,  0.10,  0.13,  0.05,  2.0,  2.0,  MotionModel::still},
      {"nature",     1920, 2160, 120.0, 1400000,  0.10,  0.24,  0.02,  0.4,  4.0,  MotionModel::still},
      {"sponza",     1920, 2160, 120.0, 282000,   0.001, 0.20,  0.0,   4.0,  40.0, MotionModel::still},
      {"san_miguel", 1920, 2160, 120.0, 4200000,  0.06,  0.15,  1.0,   0.7,  30.0, MotionModel::still},
      {"d3h",        1920, 2160, 120.0, 464000,   0.10,  0.25,  0.0,   0.7,  60.0, MotionModel::saccade_mix},
      {"d3l",        1280, 1600, 120.0, 190000,   0.10,  0.25,  2.0,   -1.5, 40.0, MotionModel::saccade_mix},
      {"h2h",        1920, 2160, 120.0, 864000,   0.10,  0.25,  0.1,   1.5,  24.0, MotionModel::saccade_mix},
      {"h2l",        1280, 1600, 120.0, 1128000,  0.15,  0.30,  0.05,  4.0,  2.0,  MotionModel::saccade_mix},
      {"gd",         1920, 2160, 120.0, 2325000,  0.10,  0.20,  0.01,  4.0,  3.0,  MotionModel::saccade_mix},
      {"nfs",        1920, 2160, 120.0, 920000,   0.10,  0.25,  0.02,  1.0,  12.0, MotionModel::saccade_mix},
      {"wf",         1920, 2160, 120.0, 3536000,  0.10,  0.25,  0.02,  4.0,  2.0,  MotionModel::saccade_mix},
  };
  return presets;
}

inline const AppPreset& find_preset(const std::string& name) {
  for (const auto& p : app_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown app preset: " + name);
}

// Sample the radial profile onto the workload grid and normalize. The
// default grid keeps cells well under a degree of visual angle so fovea
// capture grows smoothly as the disc expands.
inline std::shared_ptr<const DensityField> make_density_field(
    const AppPreset& preset, int cols = 256, int rows = 288) {
  const DisplayConfig disp = preset.display();
  const double ppd = disp.pixels_per_degree();
  auto field = std::make_shared<DensityField>();
  field->cols = cols;
  field->rows = rows;
  field->cells.resize(static_cast<std::size_t>(cols) * rows);
  const double cx = disp.width_px / 2.0, cy = disp.height_px / 2.0;
  double total = 0.0;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const double x = (i + 0.5) * disp.width_px / cols;
      const double y = (j + 0.5) * disp.height_px / rows;
      const double r_deg = std::hypot(x - cx, y - cy) / ppd;
      const double w = preset.density_weight(r_deg);
      field->cells[static_cast<std::size_t>(j) * cols + i] = w;
      total += w;
    }
  }
  for (double& c : field->cells) c /= total;
  return field;
}

// Continuous-space share of the workload inside eccentricity e for a centred
// gaze: the radial profile integrated against the clipped disc area. Smooth
// in e, unlike the grid sum, so derived curves are strictly monotone.
class RadialMass {
 public:
  explicit RadialMass(const AppPreset& preset, double step_px = 1.0) {
    const DisplayConfig disp = preset.display();
    const double ppd = disp.pixels_per_degree();
    const double cx = disp.width_px / 2.0, cy = disp.height_px / 2.0;
    const double r_max = std::hypot(cx, cy);
    step_px_ = step_px;
    ppd_ = ppd;
    cumulative_.push_back(0.0);
    double prev_area = 0.0;
    for (double r = step_px; r <= r_max + step_px; r += step_px) {
      const double area = disc_rect_intersection_area(
          cx, cy, std::min(r, r_max), disp.width_px, disp.height_px);
      const double mid_deg = (r - step_px / 2.0) / ppd;
      cumulative_.push_back(cumulative_.back() +
                            preset.density_weight(mid_deg) * (area - prev_area));
      prev_area = area;
    }
  }

  double fraction_inside(double e_deg) const {
    const double r = e_deg * ppd_;
    const double idx = r / step_px_;
    const std::size_t lo = static_cast<std::size_t>(idx);
    const double total = cumulative_.back();
    if (lo + 1 >= cumulative_.size()) return 1.0;
    const double f = idx - lo;
    return (cumulative_[lo] * (1.0 - f) + cumulative_[lo + 1] * f) / total;
  }

 private:
  std::vector<double> cumulative_;
  double step_px_ = 1.0;
  double ppd_ = 1.0;
};

// Local GPU triangle rate implied by the latency target: the heaviest
// configured workload must finish its fovea at the reference eccentricity in
// the reference time. Uses the same gridded workload fraction the frame loop
// uses, so the heaviest preset hits the reference time exactly.
inline double calibrate_gpu_rate(const std::vector<AppPreset>& presets,
                                 double e_ref_deg = 15.0,
                                 double t_ref_s = 0.0109) {
  if (presets.empty()) throw std::invalid_argument("no presets to calibrate");
  if (!(e_ref_deg > 0) || !(t_ref_s > 0))
    throw std::invalid_argument("calibration references must be positive");
  double heaviest = 0.0;
  for (const auto& p : presets) {
    const DisplayConfig disp = p.display();
    SceneFrame scene;
    scene.triangles = p.triangles;
    scene.density = make_density_field(p);
    LayerGeometry geom;
    geom.display_width_px = disp.width_px;
    geom.display_height_px = disp.height_px;
    geom.center_x_px = disp.width_px / 2.0;
    geom.center_y_px = disp.height_px / 2.0;
    geom.fovea_radius_px = e_ref_deg * disp.pixels_per_degree();
    heaviest = std::max(heaviest, static_cast<double>(p.triangles) *
                                      fovea_workload_fraction(scene, geom));
  }
  return heaviest / t_ref_s;
}

struct TraceFrame {
  SceneFrame scene;
  MotionSample motion;
  double center_x_px = 0.0;
  double center_y_px = 0.0;
};

struct Trace {
  std::string preset_name;
  std::vector<TraceFrame> frames;
};

struct TraceSpec {
  std::string preset;
  int frames = 300;
  MotionModel motion = MotionModel::still;
  bool motion_overridden = false;
  std::uint64_t seed = 1;
};

// Compact trace slug: "<preset>:<frames>[:<motion>[:<seed>]]".
inline TraceSpec parse_trace_spec(const std::string& slug) {
  std::vector<std::string> parts;
  std::stringstream ss(slug);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty() || parts.size() > 4)
    throw std::invalid_argument("trace spec must be preset:frames[:motion[:seed]]");
  TraceSpec spec;
  spec.preset = parts[0];
  find_preset(spec.preset);  // validate early
  if (parts.size() > 1) {
    spec.frames = std::stoi(parts[1]);
    if (spec.frames <= 0) throw std::invalid_argument("frame count must be positive");
  }
  if (parts.size() > 2) {
    spec.motion = parse_motion_model(parts[2]);
    spec.motion_overridden = true;
  }
  if (parts.size() > 3) spec.seed = std::stoull(parts[3]);
  return spec;
}

namespace detail {
constexpr std::uint64_t kStreamF = 0xf00d01;
constexpr std::uint64_t kStreamSaccade = 0xf00d02;
}  // namespace detail

inline Trace generate_trace(const TraceSpec& spec) {
  const AppPreset& preset = find_preset(spec.preset);
  const MotionModel motion =
      spec.motion_overridden ? spec.motion : preset.default_motion;
  const DisplayConfig disp = preset.display();
  const auto density = make_density_field(preset);

  Trace trace;
  trace.preset_name = preset.name;
  trace.frames.reserve(static_cast<std::size_t>(spec.frames));

  double gx = disp.width_px / 2.0, gy = disp.height_px / 2.0;
  double pan_dir = 1.0;
  // Saccade state: frames left in the current dwell.
  SplitMix saccade_rng(splitmix64(spec.seed ^ detail::kStreamSaccade));
  int dwell = 20 + static_cast<int>(saccade_rng.next_below(41));

  for (int t = 0; t < spec.frames; ++t) {
    TraceFrame fr;
    fr.scene.frame_id = t;
    fr.scene.triangles = preset.triangles;
    fr.scene.density = density;
    fr.scene.interactive_fraction_f =
        uniform_range(spec.seed, detail::kStreamF, static_cast<std::uint64_t>(t),
                      preset.f_min, preset.f_max);

    MotionSample m;
    switch (motion) {
      case MotionModel::still:
        break;
      case MotionModel::pan: {
        m.d6[5] = 0.5;  // steady yaw, degrees per frame
        m.gaze_dx_px = 3.0 * pan_dir;
        if (gx + m.gaze_dx_px > disp.width_px * 0.9 ||
            gx + m.gaze_dx_px < disp.width_px * 0.1) {
          pan_dir = -pan_dir;
          m.gaze_dx_px = 3.0 * pan_dir;
        }
        break;
      }
      case MotionModel::saccade_mix: {
        if (dwell > 0) {
          --dwell;
        } else {
          const double jx = saccade_rng.next_range(100.0, 400.0) *
                            (saccade_rng.next_below(2) ? 1.0 : -1.0);
          const double jy = saccade_rng.next_range(50.0, 200.0) *
                            (saccade_rng.next_below(2) ? 1.0 : -1.0);
          m.gaze_dx_px = jx;
          m.gaze_dy_px = jy;
          m.d6[5] = saccade_rng.next_range(2.0, 6.0) *
                    (saccade_rng.next_below(2) ? 1.0 : -1.0);
          dwell = 20 + static_cast<int>(saccade_rng.next_below(41));
        }
        break;
      }
    }
    gx = std::min(static_cast<double>(disp.width_px),
                  std::max(0.0, gx + m.gaze_dx_px));
    gy = std::min(static_cast<double>(disp.height_px),
                  std::max(0.0, gy + m.gaze_dy_px));
    fr.motion = m;
    fr.center_x_px = gx;
    fr.center_y_px = gy;
    trace.frames.push_back(std::move(fr));
  }
  return trace;
}

inline constexpr const char* kTraceSchema = "qvr.trace.v1";
inline constexpr const char* kTraceHeader =
    "frame_id,triangles,f,dx_m,dy_m,dz_m,droll_deg,dpitch_deg,dyaw_deg,"
    "gaze_dx_px,gaze_dy_px";

// Per-frame trace ingest. Leading '#' comment lines are skipped; the first
// real line must match kTraceHeader exactly. The preset supplies the display
// and density profile; gaze deltas are accumulated into the fovea centre
// starting from the display centre.
inline Trace load_trace_csv(const std::string& path,
                            const std::string& preset_name) {
  const AppPreset& preset = find_preset(preset_name);
  const DisplayConfig disp = preset.display();
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trace: " + path);

  std::string line;
  int lineno_header = 0;
  for (;;) {
    if (!std::getline(f, line))
      throw std::runtime_error(path + ": no column header found");
    ++lineno_header;
    if (!line.empty() && line[0] == '#') continue;
    break;
  }
  if (line != kTraceHeader)
    throw std::runtime_error(path + ":" + std::to_string(lineno_header) +
                             ": unexpected header, want: " +
                             std::string(kTraceHeader));

  const auto density = make_density_field(preset);
  Trace trace;
  trace.preset_name = preset.name;
  double gx = disp.width_px / 2.0, gy = disp.height_px / 2.0;
  int lineno = lineno_header;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 11)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": want 11 columns, got " +
                               std::to_string(cols.size()));
    TraceFrame fr;
    try {
      fr.scene.frame_id = std::stoll(cols[0]);
      fr.scene.triangles = std::stoll(cols[1]);
      fr.scene.interactive_fraction_f = std::stod(cols[2]);
      for (int i = 0; i < 6; ++i) fr.motion.d6[i] = std::stod(cols[3 + i]);
      fr.motion.gaze_dx_px = std::stod(cols[9]);
      fr.motion.gaze_dy_px = std::stod(cols[10]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed numeric field");
    }
    if (fr.scene.triangles < 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": negative triangle count");
    fr.scene.density = density;
    gx = std::min(static_cast<double>(disp.width_px),
                  std::max(0.0, gx + fr.motion.gaze_dx_px));
    gy = std::min(static_cast<double>(disp.height_px),
                  std::max(0.0, gy + fr.motion.gaze_dy_px));
    fr.center_x_px = gx;
    fr.center_y_px = gy;
    trace.frames.push_back(std::move(fr));
  }
  if (trace.frames.empty())
    throw std::runtime_error(path + ": trace has no frames");
  return trace;
}

inline void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace: " + path);
  out << "# schema: " << kTraceSchema << "\n" << kTraceHeader << "\n";
  char buf[64];
  const auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (const TraceFrame& fr : trace.frames) {
    out << fr.scene.frame_id << ',' << fr.scene.triangles << ','
        << num(fr.scene.interactive_fraction_f);
    for (int i = 0; i < 6; ++i) out << ',' << num(fr.motion.d6[i]);
    out << ',' << num(fr.motion.gaze_dx_px) << ',' << num(fr.motion.gaze_dy_px)
        << "\n";
  }
}

}  // namespace qvr
