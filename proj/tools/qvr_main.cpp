// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver for the simulator suite.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qvr/config.hpp"
#include "qvr/image.hpp"
#include "qvr/pipeline.hpp"
#include "qvr/reports.hpp"
#include "qvr/trace.hpp"
#include "qvr/uca.hpp"

namespace {

qvr::Trace resolve_trace(const std::string& trace_arg,
                         const std::string& preset_flag, std::uint64_t seed) {
  if (trace_arg.size() > 4 &&
      trace_arg.substr(trace_arg.size() - 4) == ".csv") {
    if (preset_flag.empty())
      throw std::runtime_error("--preset is required with a CSV trace");
    return qvr::load_trace_csv(trace_arg, preset_flag);
  }
  qvr::TraceSpec spec = qvr::parse_trace_spec(trace_arg);
  if (spec.seed == 1 && seed != 1) spec.seed = seed;
  return qvr::generate_trace(spec);
}

std::vector<double> parse_numbers(const std::string& csv, std::size_t lo,
                                  std::size_t hi, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  if (out.size() < lo || out.size() > hi)
    throw std::runtime_error(std::string("bad ") + what + ": " + csv);
  return out;
}

int run_simulate(const std::string& config_path, const std::string& trace_arg,
                 const std::string& preset_flag, const std::string& mode_name,
                 const std::string& network, double freq, std::uint64_t seed,
                 const std::string& out_dir, const std::string& table_in,
                 const std::string& table_out) {
  qvr::SimulateOptions opt;
  if (!config_path.empty()) opt.base = qvr::load_sim_config(config_path);
  const qvr::Trace trace = resolve_trace(trace_arg, preset_flag, seed);
  opt.preset = trace.preset_name;
  opt.network = network;
  opt.mode = qvr::parse_mode(mode_name);
  opt.gpu_freq_scale = freq;
  opt.seed = seed;
  opt.table_in = table_in;
  opt.table_out = table_out;
  const qvr::RunResult result = qvr::run_simulation(opt, trace, out_dir);
  const qvr::RunSummary& s = result.summary;
  std::printf("%s %s %s freq=%.3g frames=%d\n", qvr::to_string(s.mode),
              s.preset.c_str(), s.network.c_str(), s.gpu_freq_scale, s.frames);
  std::printf("  mean e1        %.4g deg\n", s.mean_e1_deg);
  std::printf("  mean t_e2e     %.4g ms (p95 %.4g, p99 %.4g)\n",
              s.mean_t_e2e_s * 1e3, s.p95_t_e2e_s * 1e3, s.p99_t_e2e_s * 1e3);
  std::printf("  mean fps       %.4g Hz (%s)\n", s.mean_fps_hz,
              s.feasible ? "meets target" : "below target");
  std::printf("  balanced       %.1f%% of frames\n",
              100.0 * s.balanced_fraction);
  std::printf("  bytes sent     %lld\n",
              static_cast<long long>(s.total_bytes));
  std::printf("  artifacts      %s\n", out_dir.c_str());
  return 0;
}

int run_sweep_cmd(const std::string& spec_path, const std::string& config_path,
                  const std::string& out_dir) {
  qvr::SimConfig base;
  if (!config_path.empty()) base = qvr::load_sim_config(config_path);
  const qvr::SweepSpec spec = qvr::load_sweep_spec(spec_path);
  const qvr::SweepResult sweep = qvr::run_sweep(base, spec);
  qvr::write_sweep_artifacts(sweep, out_dir);
  std::printf("sweep: %zu cells (%zu presets x %zu networks x %zu clocks x "
              "%zu modes), %d frames each\n",
              sweep.cells.size(), spec.presets.size(), spec.networks.size(),
              spec.gpu_freq_scales.size(), spec.modes.size(), spec.frames);
  std::printf("  artifacts    %s\n", out_dir.c_str());
  return 0;
}

int run_uca_cmd(const std::vector<std::string>& layer_paths,
                const std::string& scales_csv, const std::string& geometry_csv,
                const std::string& pose_csv, double band,
                const std::string& out_path, bool compare) {
  using namespace qvr;
  if (layer_paths.empty()) throw std::runtime_error("need at least one layer");
  const auto scales =
      parse_numbers(scales_csv, layer_paths.size(), layer_paths.size(),
                    "--scales (one per layer)");
  const auto geo = parse_numbers(geometry_csv, 4, 4, "--geometry cx,cy,r1,r2");
  const auto pose = parse_numbers(pose_csv, 3, 4, "--pose yaw,pitch,roll[,k1]");

  std::vector<LayerImage> layers;
  static const LayerKind kinds[3] = {LayerKind::fovea, LayerKind::middle,
                                     LayerKind::outer};
  for (std::size_t i = 0; i < layer_paths.size(); ++i) {
    LayerImage layer;
    layer.image = load_ppm(layer_paths[i]);
    layer.scale = scales[i];
    layer.kind = kinds[std::min<std::size_t>(i, 2)];
    if (i + 1 < layer_paths.size()) {
      // Inner layers are patches centred on the gaze point; only the
      // outermost layer is anchored at the display origin.
      layer.origin_x = geo[0] - layer.image.width * layer.scale / 2.0;
      layer.origin_y = geo[1] - layer.image.height * layer.scale / 2.0;
    }
    layers.push_back(std::move(layer));
  }
  const double s1 = scales.size() > 1 ? scales[1] : scales[0];
  const double s2 = scales.back();
  // Largest display the outermost layer covers with bilinear taps: its last
  // sample row and column land exactly on the far display edge.
  const LayerGeometry geom = layer_geometry_px(
      geo[0], geo[1], geo[2], geo[3], s1, s2,
      static_cast<int>((layers.back().image.width - 1) * s2) + 1,
      static_cast<int>((layers.back().image.height - 1) * s2) + 1);

  ReprojectionMap map;
  map.yaw_deg = pose[0];
  map.pitch_deg = pose[1];
  map.roll_deg = pose[2];
  map.lens_k1 = pose.size() > 3 ? pose[3] : 0.0;

  const TilePlan plan = build_tile_plan(layers, geom, band, 32,
                                        max_displacement_px(map, geom.display_width_px,
                                                            geom.display_height_px));
  const Image unified = unified_uca(layers, geom, map, band, plan);
  save_ppm(unified, out_path);
  UcaCostModel cost;
  std::printf("uca: %dx%d output, %zu tiles (%zu border), latency %.4g ms\n",
              unified.width, unified.height, plan.tiles.size(),
              plan.border_count(), uca_latency(plan, cost) * 1e3);
  std::printf("  wrote %s\n", out_path.c_str());
  if (compare) {
    const Image ref = sequential_reference(layers, geom, map, band);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < ref.rgb.size(); ++i)
      max_diff = std::max(
          max_diff, static_cast<double>(std::fabs(ref.rgb[i] - unified.rgb[i])));
    std::printf("  max |unified - sequential| = %.3g per channel\n", max_diff);
  }
  return 0;
}

int run_validate(const std::string& dir) {
  const auto issues = qvr::validate_dir(dir);
  if (issues.empty()) {
    std::printf("ok: all csv/json artifacts under %s carry qvr schemas\n",
                dir.c_str());
    return 0;
  }
  for (const auto& issue : issues)
    std::fprintf(stderr, "invalid: %s: %s\n", issue.file.c_str(),
                 issue.message.c_str());
  return 1;
}

int run_trace_cmd(const std::string& spec_slug, const std::string& out_path) {
  const qvr::Trace trace = qvr::generate_trace(qvr::parse_trace_spec(spec_slug));
  qvr::write_trace_csv(trace, out_path);
  std::printf("trace: %s, %zu frames -> %s\n", trace.preset_name.c_str(),
              trace.frames.size(), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative foveated rendering simulator"};
  app.require_subcommand(1);

  std::string config_path, trace_arg, preset_flag, mode_name = "qvr";
  std::string network = "wifi", out_dir = "out";
  std::string table_in, table_out;
  double freq = 1.0;
  std::uint64_t seed = 1;

  CLI::App* sim = app.add_subcommand("simulate", "Run one trace through a pipeline");
  sim->add_option("--config", config_path, "Simulator config JSON");
  sim->add_option("--trace", trace_arg,
                  "Trace slug preset:frames[:motion[:seed]] or CSV path")
      ->required();
  sim->add_option("--preset", preset_flag, "Preset name (CSV traces only)");
  sim->add_option("--mode", mode_name,
                  "local_only|remote_only|static|ffr|dfr|qvr");
  sim->add_option("--network", network, "wifi|lte4g|early5g");
  sim->add_option("--freq", freq, "Local GPU frequency scale");
  sim->add_option("--seed", seed, "Channel / trace seed");
  sim->add_option("--out", out_dir, "Artifact directory");
  sim->add_option("--table-in", table_in, "Warm-start mapping table");
  sim->add_option("--table-out", table_out, "Trained mapping table dump");

  std::string sweep_spec_path, sweep_config_path, sweep_out = "sweep_out";
  CLI::App* sw = app.add_subcommand("sweep", "Run a preset/network/clock grid");
  sw->add_option("--config", sweep_spec_path, "Sweep spec JSON")->required();
  sw->add_option("--sim-config", sweep_config_path, "Simulator config JSON");
  sw->add_option("--out", sweep_out, "Artifact directory");

  std::vector<std::string> layer_paths;
  std::string scales_csv, geometry_csv, pose_csv, uca_out = "uca_out.ppm";
  double band = 8.0;
  bool compare = false;
  CLI::App* uc = app.add_subcommand("uca", "Compose and warp layer images");
  uc->add_option("--layers", layer_paths, "Layer PPMs, innermost first")
      ->required()
      ->expected(1, 3);
  uc->add_option("--scales", scales_csv, "Per-layer upsample factors, comma separated")
      ->required();
  uc->add_option("--geometry", geometry_csv, "cx,cy,r1,r2 in display pixels")
      ->required();
  uc->add_option("--pose", pose_csv, "yaw,pitch,roll[,k1] degrees")->required();
  uc->add_option("--band", band, "Blend band width in pixels");
  uc->add_option("--out", uca_out, "Output PPM path");
  uc->add_flag("--compare", compare, "Also run the two-pass reference and diff");

  std::string validate_target;
  CLI::App* val = app.add_subcommand("validate-schema",
                                     "Check artifact schemas in a directory");
  val->add_option("dir", validate_target, "Artifact directory")->required();

  std::string trace_slug, trace_out = "trace.csv";
  CLI::App* tr = app.add_subcommand("trace", "Generate a motion trace CSV");
  tr->add_option("--spec", trace_slug, "preset:frames[:motion[:seed]]")
      ->required();
  tr->add_option("--out", trace_out, "Output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return run_simulate(config_path, trace_arg, preset_flag, mode_name,
                          network, freq, seed, out_dir, table_in, table_out);
    if (sw->parsed())
      return run_sweep_cmd(sweep_spec_path, sweep_config_path, sweep_out);
    if (uc->parsed())
      return run_uca_cmd(layer_paths, scales_csv, geometry_csv, pose_csv, band,
                         uca_out, compare);
    if (val->parsed()) return run_validate(validate_target);
    if (tr->parsed()) return run_trace_cmd(trace_slug, trace_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
