// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvr/config.hpp"
#include "qvr/pipeline.hpp"
#include "qvr/trace.hpp"

namespace qvr {

// Artifact writers. Every emitted file is deterministic for a given input:
// doubles go through one fixed shortest-round-trip format and no file
// carries timestamps or absolute paths.

inline constexpr const char* kFramesSchema = "qvr.frames.v1";
inline constexpr const char* kSummarySchema = "qvr.summary.v1";
inline constexpr const char* kMatrixSchema = "qvr.matrix.v1";
inline constexpr const char* kPlotSchema = "qvr.plot.v1";
inline constexpr const char* kSweepSummarySchema = "qvr.sweep-summary.v1";

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline void write_frames_csv(const std::vector<FrameReport>& reports,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write frames csv: " + path);
  out << "# schema: " << kFramesSchema << "\n";
  out << "frame_id,mode,e1_deg,e2_star_deg,t_local_s,t_remote_path_s,"
         "t_uca_s,t_e2e_s,fps_hz,bytes_tx,latency_ratio,balanced\n";
  for (const FrameReport& r : reports) {
    out << r.frame_id << ',' << to_string(r.mode) << ',' << fmt_double(r.e1_deg)
        << ',' << fmt_double(r.e2_star_deg) << ',' << fmt_double(r.t_local_s)
        << ',' << fmt_double(r.t_remote_path_s) << ',' << fmt_double(r.t_uca_s)
        << ',' << fmt_double(r.t_e2e_s) << ',' << fmt_double(r.fps_hz) << ','
        << r.bytes_tx << ',' << fmt_double(r.latency_ratio) << ','
        << (r.balanced ? 1 : 0) << "\n";
  }
}

inline nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json j;
  j["schema"] = kSummarySchema;
  j["mode"] = to_string(s.mode);
  j["preset"] = s.preset;
  j["network"] = s.network;
  j["gpu_freq_scale"] = s.gpu_freq_scale;
  j["frames"] = s.frames;
  j["warmup_frames"] = s.warmup_frames;
  j["mean_e1_deg"] = s.mean_e1_deg;
  j["mean_t_e2e_s"] = s.mean_t_e2e_s;
  j["p50_t_e2e_s"] = s.p50_t_e2e_s;
  j["p95_t_e2e_s"] = s.p95_t_e2e_s;
  j["p99_t_e2e_s"] = s.p99_t_e2e_s;
  j["mean_fps_hz"] = s.mean_fps_hz;
  j["mean_latency_ratio"] = s.mean_latency_ratio;
  j["balanced_fraction"] = s.balanced_fraction;
  j["total_bytes"] = s.total_bytes;
  j["feasible"] = s.feasible;
  return j;
}

inline void write_summary_json(const RunSummary& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary: " + path);
  out << to_json(s).dump(2) << "\n";
}

// Row-keyed (gpu_freq_scale, network), column-keyed preset metric matrix.
struct MetricMatrix {
  std::string metric;
  std::vector<std::string> presets;
  struct Row {
    double gpu_freq_scale = 1.0;
    std::string network;
    std::vector<double> values;
  };
  std::vector<Row> rows;
};

inline void write_matrix_csv(const MetricMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix csv: " + path);
  out << "# schema: " << kMatrixSchema << " metric=" << m.metric << "\n";
  out << "gpu_freq_scale,network";
  for (const auto& p : m.presets) out << ',' << p;
  out << "\n";
  for (const auto& row : m.rows) {
    if (row.values.size() != m.presets.size())
      throw std::invalid_argument("matrix row width mismatch");
    out << fmt_double(row.gpu_freq_scale) << ',' << row.network;
    for (double v : row.values) out << ',' << fmt_double(v);
    out << "\n";
  }
}

inline MetricMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix csv: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind(std::string("# schema: ") + kMatrixSchema, 0) != 0)
    throw std::runtime_error("missing matrix schema line: " + path);
  MetricMatrix m;
  const auto eq = line.find("metric=");
  if (eq != std::string::npos) m.metric = line.substr(eq + 7);
  if (!std::getline(in, line))
    throw std::runtime_error("missing matrix header: " + path);
  {
    std::stringstream ss(line);
    std::string cell;
    int idx = 0;
    while (std::getline(ss, cell, ',')) {
      if (idx >= 2) m.presets.push_back(cell);
      ++idx;
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    MetricMatrix::Row row;
    int idx = 0;
    while (std::getline(ss, cell, ',')) {
      if (idx == 0)
        row.gpu_freq_scale = std::stod(cell);
      else if (idx == 1)
        row.network = cell;
      else
        row.values.push_back(std::stod(cell));
      ++idx;
    }
    if (row.values.size() != m.presets.size())
      throw std::runtime_error("matrix row width mismatch: " + path);
    m.rows.push_back(std::move(row));
  }
  return m;
}

// Fovea workload share as a function of fovea size, one column per preset.
inline void write_fraction_plot_csv(const std::vector<std::string>& presets,
                                    const std::string& path,
                                    double e_step_deg = 1.0,
                                    double e_max_deg = 45.0) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot csv: " + path);
  out << "# schema: " << kPlotSchema << " plot=fraction_vs_eccentricity\n";
  out << "e_deg";
  std::vector<RadialMass> masses;
  for (const auto& name : presets) {
    out << ',' << name;
    masses.emplace_back(find_preset(name));
  }
  out << "\n";
  for (double e = e_step_deg; e <= e_max_deg + 1e-9; e += e_step_deg) {
    out << fmt_double(e);
    for (const auto& mass : masses) out << ',' << fmt_double(mass.fraction_inside(e));
    out << "\n";
  }
}

struct SweepCell {
  std::string preset;
  std::string network;
  double gpu_freq_scale = 1.0;
  Mode mode = Mode::qvr;
  RunSummary summary;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;

  const RunSummary* find(const std::string& preset, const std::string& network,
                         double freq, Mode mode) const {
    for (const auto& c : cells)
      if (c.preset == preset && c.network == network &&
          c.gpu_freq_scale == freq && c.mode == mode)
        return &c.summary;
    return nullptr;
  }
};

inline SweepResult run_sweep(const SimConfig& base, const SweepSpec& spec) {
  SweepResult out;
  out.spec = spec;
  std::map<std::string, Trace> traces;
  for (const auto& preset_name : spec.presets) {
    TraceSpec ts;
    ts.preset = preset_name;
    ts.frames = spec.frames;
    ts.seed = spec.seed;
    traces.emplace(preset_name, generate_trace(ts));
  }
  for (double freq : spec.gpu_freq_scales)
    for (const auto& network : spec.networks)
      for (const auto& preset_name : spec.presets)
        for (const auto& mode_name : spec.modes) {
          const Mode mode = parse_mode(mode_name);
          const PipelineConfig pc = to_pipeline_config(
              base, find_preset(preset_name), network, freq, spec.seed);
          SweepCell cell;
          cell.preset = preset_name;
          cell.network = network;
          cell.gpu_freq_scale = freq;
          cell.mode = mode;
          cell.summary = run_trace(pc, traces.at(preset_name), mode).summary;
          out.cells.push_back(std::move(cell));
        }
  return out;
}

inline MetricMatrix sweep_matrix(const SweepResult& sweep, Mode mode,
                                 const std::string& metric) {
  MetricMatrix m;
  m.metric = metric + "_" + to_string(mode);
  m.presets = sweep.spec.presets;
  for (double freq : sweep.spec.gpu_freq_scales)
    for (const auto& network : sweep.spec.networks) {
      MetricMatrix::Row row;
      row.gpu_freq_scale = freq;
      row.network = network;
      for (const auto& preset : sweep.spec.presets) {
        const RunSummary* s = sweep.find(preset, network, freq, mode);
        if (!s) throw std::runtime_error("sweep cell missing: " + preset);
        double v = 0.0;
        if (metric == "mean_e1_deg")
          v = s->mean_e1_deg;
        else if (metric == "mean_fps_hz")
          v = s->mean_fps_hz;
        else if (metric == "mean_t_e2e_s")
          v = s->mean_t_e2e_s;
        else if (metric == "total_bytes")
          v = static_cast<double>(s->total_bytes);
        else
          throw std::invalid_argument("unknown matrix metric: " + metric);
        row.values.push_back(v);
      }
      m.rows.push_back(std::move(row));
    }
  return m;
}

inline void write_sweep_artifacts(const SweepResult& sweep,
                                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/plots");
  const std::vector<std::string> metrics = {"mean_e1_deg", "mean_fps_hz",
                                            "mean_t_e2e_s", "total_bytes"};
  for (const auto& mode_name : sweep.spec.modes) {
    const Mode mode = parse_mode(mode_name);
    for (const auto& metric : metrics) {
      const MetricMatrix m = sweep_matrix(sweep, mode, metric);
      write_matrix_csv(m,
                       out_dir + "/matrix_" + metric + "_" + mode_name + ".csv");
    }
  }
  write_fraction_plot_csv(sweep.spec.presets,
                          out_dir + "/plots/fraction_vs_eccentricity.csv");
  {
    std::ofstream out(out_dir + "/plots/fps_by_mode.csv");
    out << "# schema: " << kPlotSchema << " plot=fps_by_mode\n";
    out << "preset,network,gpu_freq_scale,mode,mean_fps_hz\n";
    for (const auto& c : sweep.cells)
      out << c.preset << ',' << c.network << ','
          << fmt_double(c.gpu_freq_scale) << ',' << to_string(c.mode) << ','
          << fmt_double(c.summary.mean_fps_hz) << "\n";
  }
  {
    std::ofstream out(out_dir + "/plots/bytes_by_mode.csv");
    out << "# schema: " << kPlotSchema << " plot=bytes_by_mode\n";
    out << "preset,network,gpu_freq_scale,mode,total_bytes\n";
    for (const auto& c : sweep.cells)
      out << c.preset << ',' << c.network << ','
          << fmt_double(c.gpu_freq_scale) << ',' << to_string(c.mode) << ','
          << c.summary.total_bytes << "\n";
  }
  nlohmann::json j;
  j["schema"] = kSweepSummarySchema;
  j["spec"] = to_json(sweep.spec);
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : sweep.cells) {
    nlohmann::json cj = to_json(c.summary);
    cj.erase("schema");
    cells.push_back(cj);
  }
  j["cells"] = cells;
  std::ofstream out(out_dir + "/summary.json");
  if (!out) throw std::runtime_error("cannot write sweep summary");
  out << j.dump(2) << "\n";
}

struct SimulateOptions {
  SimConfig base;
  std::string preset;
  std::string network = "wifi";
  Mode mode = Mode::qvr;
  double gpu_freq_scale = 1.0;
  std::uint64_t seed = 1;
  std::string table_in;   // optional warm-start mapping table
  std::string table_out;  // optional trained-table dump
};

inline RunResult run_simulation(const SimulateOptions& opt, const Trace& trace,
                                const std::string& out_dir) {
  namespace fs = std::filesystem;
  const PipelineConfig pc = to_pipeline_config(
      opt.base, find_preset(opt.preset), opt.network, opt.gpu_freq_scale,
      opt.seed);
  RunResult result;
  PipelineState state = make_pipeline_state(pc);
  if (!opt.table_in.empty()) {
    state.controller.table = load_mapping_table(opt.table_in);
    state.controller.primed = true;
    state.controller_ready = true;
  }
  if (trace.frames.empty()) throw std::invalid_argument("trace has no frames");
  for (const TraceFrame& fr : trace.frames)
    result.reports.push_back(run_frame(pc, state, fr, opt.mode));
  result.summary =
      summarize_reports(pc, result.reports, opt.mode, trace.preset_name);
  fs::create_directories(out_dir);
  write_frames_csv(result.reports, out_dir + "/frames.csv");
  write_summary_json(result.summary, out_dir + "/summary.json");
  save_sim_config(opt.base, out_dir + "/config.json");
  if (!opt.table_out.empty())
    save_mapping_table(state.controller.table, pc.thresholds, opt.table_out);
  return result;
}

struct ValidationIssue {
  std::string file;
  std::string message;
};

// Check that every .csv under dir opens with a qvr schema comment and every
// .json parses and carries a qvr schema tag. Files with other extensions are
// ignored.
inline std::vector<ValidationIssue> validate_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<ValidationIssue> issues;
  if (!fs::exists(dir)) {
    issues.push_back({dir, "directory does not exist"});
    return issues;
  }
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    const std::string ext = p.extension().string();
    if (ext == ".csv") {
      std::ifstream in(p);
      std::string line;
      if (!std::getline(in, line) || line.rfind("# schema: qvr.", 0) != 0)
        issues.push_back({p.string(), "missing qvr schema comment"});
    } else if (ext == ".json") {
      std::ifstream in(p);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const std::exception& e) {
        issues.push_back({p.string(), std::string("parse error: ") + e.what()});
        continue;
      }
      if (!j.is_object() || !j.contains("schema") ||
          !j["schema"].is_string() ||
          j["schema"].get<std::string>().rfind("qvr.", 0) != 0)
        issues.push_back({p.string(), "missing qvr schema field"});
    }
  }
  return issues;
}

}  // namespace qvr
