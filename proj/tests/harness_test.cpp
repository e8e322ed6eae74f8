// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qvr/config.hpp"
#include "qvr/reports.hpp"
#include "qvr/trace.hpp"

namespace qvr {
namespace {

namespace fs = std::filesystem;

// Scratch directory that cleans up after itself. Each test uses its own name
// so suites can run concurrently.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("qvr_harness_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Presets, TableShapeAndLookup) {
  const auto& presets = app_presets();
  ASSERT_EQ(presets.size(), 12u);
  const std::vector<std::string> names = {
      "foveated3d", "viking", "nature", "sponza", "san_miguel", "d3h",
      "d3l",        "h2h",    "h2l",    "gd",     "nfs",        "wf"};
  for (std::size_t i = 0; i < names.size(); ++i)
    EXPECT_EQ(presets[i].name, names[i]);

  const AppPreset& v = find_preset("viking");
  EXPECT_EQ(v.width_px, 1920);
  EXPECT_EQ(v.height_px, 2160);
  EXPECT_EQ(v.triangles, 2800000);
  EXPECT_DOUBLE_EQ(v.f_min, 0.10);
  EXPECT_DOUBLE_EQ(v.f_max, 0.13);
  EXPECT_EQ(v.default_motion, MotionModel::still);

  const AppPreset& low = find_preset("d3l");
  EXPECT_EQ(low.width_px, 1280);
  EXPECT_EQ(low.height_px, 1600);
  EXPECT_EQ(low.default_motion, MotionModel::saccade_mix);

  EXPECT_THROW(find_preset("quake"), std::invalid_argument);
}

TEST(Presets, DensityWeightHandValues) {
  // Decaying profile: floor 0 plus (1 + 40/40)^-4.
  EXPECT_DOUBLE_EQ(find_preset("sponza").density_weight(40.0), 0.0625);
  // Rising profile (negative exponent) starts at floor + 1.
  EXPECT_DOUBLE_EQ(find_preset("d3l").density_weight(0.0), 3.0);
  EXPECT_DOUBLE_EQ(find_preset("d3l").density_weight(40.0),
                   2.0 + std::pow(2.0, 1.5));
}

TEST(Presets, DensityFieldNormalized) {
  const auto field = make_density_field(find_preset("gd"));
  EXPECT_EQ(field->cols, 256);
  EXPECT_EQ(field->rows, 288);
  double total = 0.0;
  for (double c : field->cells) {
    EXPECT_GT(c, 0.0);
    total += c;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);

  const auto small = make_density_field(find_preset("gd"), 64, 72);
  EXPECT_EQ(small->cells.size(), 64u * 72u);
}

TEST(RadialMass, MonotoneAndSaturating) {
  const RadialMass mass(find_preset("viking"));
  EXPECT_DOUBLE_EQ(mass.fraction_inside(0.0), 0.0);
  double prev = 0.0;
  for (double e = 1.0; e <= 89.0; e += 4.0) {
    const double f = mass.fraction_inside(e);
    EXPECT_GT(f, prev);
    EXPECT_LE(f, 1.0 + 1e-12);
    prev = f;
  }
  EXPECT_DOUBLE_EQ(mass.fraction_inside(90.5), 1.0);
}

TEST(Calibration, HeaviestPresetPinsTheReferenceTime) {
  const double rate = calibrate_gpu_rate(app_presets());
  EXPECT_GT(rate, 1.9e7);
  EXPECT_LT(rate, 2.1e7);
  double worst = 0.0;
  for (const AppPreset& p : app_presets()) {
    const DisplayConfig disp = p.display();
    SceneFrame scene;
    scene.triangles = p.triangles;
    scene.density = make_density_field(p);
    LayerGeometry geom;
    geom.display_width_px = disp.width_px;
    geom.display_height_px = disp.height_px;
    geom.center_x_px = disp.width_px / 2.0;
    geom.center_y_px = disp.height_px / 2.0;
    geom.fovea_radius_px = 15.0 * disp.pixels_per_degree();
    const double t =
        p.triangles * fovea_workload_fraction(scene, geom) / rate;
    EXPECT_LE(t, 0.0109 * (1.0 + 1e-12)) << p.name;
    worst = std::max(worst, t);
  }
  EXPECT_NEAR(worst, 0.0109, 0.0109 * 1e-9);
}

TEST(Calibration, RejectsDegenerateInputs) {
  EXPECT_THROW(calibrate_gpu_rate({}), std::invalid_argument);
  EXPECT_THROW(calibrate_gpu_rate(app_presets(), 0.0), std::invalid_argument);
  EXPECT_THROW(calibrate_gpu_rate(app_presets(), 15.0, -1.0),
               std::invalid_argument);
}

TEST(TraceSpecParsing, SlugVariants) {
  const TraceSpec plain = parse_trace_spec("d3h");
  EXPECT_EQ(plain.preset, "d3h");
  EXPECT_EQ(plain.frames, 300);
  EXPECT_FALSE(plain.motion_overridden);
  EXPECT_EQ(plain.seed, 1u);

  const TraceSpec full = parse_trace_spec("d3l:100:pan:7");
  EXPECT_EQ(full.preset, "d3l");
  EXPECT_EQ(full.frames, 100);
  EXPECT_TRUE(full.motion_overridden);
  EXPECT_EQ(full.motion, MotionModel::pan);
  EXPECT_EQ(full.seed, 7u);

  EXPECT_THROW(parse_trace_spec("viking:0"), std::invalid_argument);
  EXPECT_THROW(parse_trace_spec("quake:10"), std::invalid_argument);
  EXPECT_THROW(parse_trace_spec("d3h:10:zoom"), std::invalid_argument);
  EXPECT_THROW(parse_trace_spec("a:1:still:2:extra"), std::invalid_argument);
}

TEST(TraceGeneration, StillKeepsGazeAndPose) {
  TraceSpec spec;
  spec.preset = "viking";
  spec.frames = 25;
  const Trace t = generate_trace(spec);
  EXPECT_EQ(t.preset_name, "viking");
  ASSERT_EQ(t.frames.size(), 25u);
  for (const TraceFrame& fr : t.frames) {
    for (double d : fr.motion.d6) EXPECT_DOUBLE_EQ(d, 0.0);
    EXPECT_DOUBLE_EQ(fr.motion.gaze_dx_px, 0.0);
    EXPECT_DOUBLE_EQ(fr.center_x_px, 960.0);
    EXPECT_DOUBLE_EQ(fr.center_y_px, 1080.0);
    EXPECT_EQ(fr.scene.triangles, 2800000);
    EXPECT_GE(fr.scene.interactive_fraction_f, 0.10);
    EXPECT_LE(fr.scene.interactive_fraction_f, 0.13);
  }
}

TEST(TraceGeneration, SeedControlsTheInteractiveShare) {
  TraceSpec spec;
  spec.preset = "foveated3d";
  spec.frames = 20;
  const Trace a = generate_trace(spec);
  const Trace b = generate_trace(spec);
  spec.seed = 2;
  const Trace c = generate_trace(spec);
  bool differs = false;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.frames[i].scene.interactive_fraction_f,
                     b.frames[i].scene.interactive_fraction_f);
    differs |= a.frames[i].scene.interactive_fraction_f !=
               c.frames[i].scene.interactive_fraction_f;
  }
  EXPECT_TRUE(differs);
}

TEST(TraceGeneration, PanSweepsTheGazeBetweenMargins) {
  TraceSpec spec;
  spec.preset = "viking";
  spec.frames = 300;
  spec.motion = MotionModel::pan;
  spec.motion_overridden = true;
  const Trace t = generate_trace(spec);
  bool right = false, left = false;
  for (const TraceFrame& fr : t.frames) {
    EXPECT_DOUBLE_EQ(fr.motion.d6[5], 0.5);
    right |= fr.motion.gaze_dx_px > 0;
    left |= fr.motion.gaze_dx_px < 0;
    EXPECT_GE(fr.center_x_px, 1920 * 0.1 - 3.0);
    EXPECT_LE(fr.center_x_px, 1920 * 0.9 + 3.0);
  }
  EXPECT_TRUE(right);
  EXPECT_TRUE(left);
}

TEST(TraceGeneration, SaccadeMixAlternatesDwellAndJump) {
  TraceSpec spec;
  spec.preset = "d3h";
  spec.frames = 200;
  const Trace t = generate_trace(spec);  // preset default is saccade-mix
  int jumps = 0;
  for (const TraceFrame& fr : t.frames) {
    const bool jump = fr.motion.gaze_dx_px != 0.0;
    if (jump) {
      ++jumps;
      EXPECT_GE(std::abs(fr.motion.gaze_dx_px), 100.0);
      EXPECT_LE(std::abs(fr.motion.gaze_dx_px), 400.0);
      EXPECT_GE(std::abs(fr.motion.gaze_dy_px), 50.0);
      EXPECT_LE(std::abs(fr.motion.gaze_dy_px), 200.0);
      EXPECT_GE(std::abs(fr.motion.d6[5]), 2.0);
      EXPECT_LE(std::abs(fr.motion.d6[5]), 6.0);
    } else {
      for (double d : fr.motion.d6) EXPECT_DOUBLE_EQ(d, 0.0);
    }
  }
  // Dwells last 20 to 60 frames, so 200 frames always hold several jumps.
  EXPECT_GE(jumps, 3);
  EXPECT_LE(jumps, 10);
}

TEST(TraceGeneration, MotionOverrideSilencesAPreset) {
  const Trace t = generate_trace(parse_trace_spec("d3h:30:still"));
  for (const TraceFrame& fr : t.frames) {
    for (double d : fr.motion.d6) EXPECT_DOUBLE_EQ(d, 0.0);
    EXPECT_DOUBLE_EQ(fr.motion.gaze_dx_px, 0.0);
  }
}

TEST(TraceCsv, WriteLoadWriteIsByteStable) {
  TempDir dir("trace_roundtrip");
  const Trace t = generate_trace(parse_trace_spec("d3h:25"));
  const std::string p1 = (dir.path / "a.csv").string();
  const std::string p2 = (dir.path / "b.csv").string();
  write_trace_csv(t, p1);
  const Trace back = load_trace_csv(p1, "d3h");
  write_trace_csv(back, p2);
  EXPECT_EQ(slurp(p1), slurp(p2));
  ASSERT_EQ(back.frames.size(), t.frames.size());
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    EXPECT_EQ(back.frames[i].scene.frame_id, t.frames[i].scene.frame_id);
    EXPECT_EQ(back.frames[i].scene.triangles, t.frames[i].scene.triangles);
    EXPECT_NEAR(back.frames[i].center_x_px, t.frames[i].center_x_px, 1e-5);
    EXPECT_NEAR(back.frames[i].center_y_px, t.frames[i].center_y_px, 1e-5);
  }
  const std::string text = slurp(p1);
  EXPECT_EQ(text.rfind("# schema: qvr.trace.v1\n", 0), 0u);
}

TEST(TraceCsv, GazeDeltasAccumulateFromTheDisplayCentre) {
  TempDir dir("trace_gaze");
  const std::string path = (dir.path / "t.csv").string();
  {
    std::ofstream out(path);
    out << "# schema: qvr.trace.v1\n" << kTraceHeader << "\n";
    out << "0,1000,0.1,0,0,0,0,0,0,100,0\n";
    out << "1,1000,0.1,0,0,0,0,0,0,-50,25\n";
  }
  const Trace t = load_trace_csv(path, "viking");
  ASSERT_EQ(t.frames.size(), 2u);
  EXPECT_DOUBLE_EQ(t.frames[0].center_x_px, 1060.0);
  EXPECT_DOUBLE_EQ(t.frames[0].center_y_px, 1080.0);
  EXPECT_DOUBLE_EQ(t.frames[1].center_x_px, 1010.0);
  EXPECT_DOUBLE_EQ(t.frames[1].center_y_px, 1105.0);
}

TEST(TraceCsv, RejectsMalformedFiles) {
  TempDir dir("trace_bad");
  const auto write_file = [&](const char* name, const std::string& body) {
    const std::string p = (dir.path / name).string();
    std::ofstream out(p);
    out << body;
    return p;
  };
  EXPECT_THROW(load_trace_csv((dir.path / "missing.csv").string(), "viking"),
               std::runtime_error);
  const std::string hdr = std::string(kTraceHeader) + "\n";
  EXPECT_THROW(
      load_trace_csv(write_file("h.csv", "frame,triangles\n0,1\n"), "viking"),
      std::runtime_error);
  EXPECT_THROW(
      load_trace_csv(write_file("c.csv", hdr + "0,1000,0.1,0,0,0,0,0,0,0\n"),
                     "viking"),
      std::runtime_error);
  EXPECT_THROW(
      load_trace_csv(
          write_file("n.csv", hdr + "0,1000,x,0,0,0,0,0,0,0,0\n"), "viking"),
      std::runtime_error);
  EXPECT_THROW(
      load_trace_csv(
          write_file("t.csv", hdr + "0,-5,0.1,0,0,0,0,0,0,0,0\n"), "viking"),
      std::runtime_error);
  EXPECT_THROW(load_trace_csv(write_file("e.csv", hdr), "viking"),
               std::runtime_error);
}

TEST(SimConfigJson, RoundTripPreservesEveryField) {
  SimConfig c;
  c.display.width_px = 1280;
  c.display.height_px = 1600;
  c.mar.m = 1.5;
  c.thresholds.gaze_mag_px = 12.0;
  c.uca_cost.units = 4;
  c.local_gpu_rate_tri_per_s = 3.0e7;
  c.remote_gpu_ratio = 25.0;
  c.blend_band_px = 6.0;
  c.uca_overlap_fraction = 0.25;
  c.sensor_latency_s = 0.003;
  c.fps_target_hz = 72.0;
  c.compression_ratio = 0.05;
  c.static_mispredict_threshold = 3.0;
  c.e_max_deg = 60.0;
  c.e1_init_deg = 8.0;
  c.liwc_alpha = 0.2;
  c.warmup_frames = 10;
  c.tile_size = 16;
  const SimConfig back = sim_config_from_json(to_json(c));
  EXPECT_EQ(back.display.width_px, 1280);
  EXPECT_EQ(back.display.height_px, 1600);
  EXPECT_DOUBLE_EQ(back.mar.m, 1.5);
  EXPECT_DOUBLE_EQ(back.thresholds.gaze_mag_px, 12.0);
  EXPECT_EQ(back.uca_cost.units, 4);
  EXPECT_DOUBLE_EQ(back.local_gpu_rate_tri_per_s, 3.0e7);
  EXPECT_DOUBLE_EQ(back.remote_gpu_ratio, 25.0);
  EXPECT_DOUBLE_EQ(back.blend_band_px, 6.0);
  EXPECT_DOUBLE_EQ(back.uca_overlap_fraction, 0.25);
  EXPECT_DOUBLE_EQ(back.sensor_latency_s, 0.003);
  EXPECT_DOUBLE_EQ(back.fps_target_hz, 72.0);
  EXPECT_DOUBLE_EQ(back.compression_ratio, 0.05);
  EXPECT_DOUBLE_EQ(back.static_mispredict_threshold, 3.0);
  EXPECT_DOUBLE_EQ(back.e_max_deg, 60.0);
  EXPECT_DOUBLE_EQ(back.e1_init_deg, 8.0);
  EXPECT_DOUBLE_EQ(back.liwc_alpha, 0.2);
  EXPECT_EQ(back.warmup_frames, 10);
  EXPECT_EQ(back.tile_size, 16);
}

TEST(SimConfigJson, DefaultsAndErrors) {
  const SimConfig defaults = sim_config_from_json(nlohmann::json::object());
  EXPECT_EQ(defaults.display.width_px, SimConfig{}.display.width_px);
  EXPECT_DOUBLE_EQ(defaults.compression_ratio, SimConfig{}.compression_ratio);

  nlohmann::json wrong = {{"schema", "qvr.config.v2"}};
  EXPECT_THROW(sim_config_from_json(wrong), std::invalid_argument);

  nlohmann::json text_field = {{"pipeline", {{"fps_target_hz", "fast"}}}};
  EXPECT_THROW(sim_config_from_json(text_field), std::invalid_argument);

  nlohmann::json frac_int = {{"display", {{"width_px", 1920.5}}}};
  EXPECT_THROW(sim_config_from_json(frac_int), std::invalid_argument);
}

TEST(SweepSpecJson, ValidationRejectsEmptyAxes) {
  SweepSpec s;
  s.presets = {"d3h"};
  s.networks = {"wifi"};
  s.gpu_freq_scales = {1.0};
  s.modes = {"qvr"};
  const SweepSpec back = sweep_spec_from_json(to_json(s));
  EXPECT_EQ(back.presets, s.presets);
  EXPECT_EQ(back.frames, 300);

  const auto broken = [&](auto mutate) {
    nlohmann::json j = to_json(s);
    mutate(j);
    EXPECT_THROW(sweep_spec_from_json(j), std::invalid_argument);
  };
  broken([](nlohmann::json& j) { j["presets"] = nlohmann::json::array(); });
  broken([](nlohmann::json& j) { j["networks"] = nlohmann::json::array(); });
  broken([](nlohmann::json& j) { j["gpu_freq_scales"] = nlohmann::json::array(); });
  broken([](nlohmann::json& j) { j["modes"] = nlohmann::json::array(); });
  broken([](nlohmann::json& j) { j["frames"] = 0; });
  broken([](nlohmann::json& j) { j["schema"] = "qvr.sweep.v9"; });
}

TEST(PipelineConfigMaterialization, CalibratesAndResolvesPerDisplay) {
  SimConfig base;
  const PipelineConfig calibrated =
      to_pipeline_config(base, find_preset("d3h"), "early5g", 1.0, 1);
  EXPECT_DOUBLE_EQ(calibrated.nominal_rates.gpu_rate_tri_per_s,
                   calibrate_gpu_rate(app_presets()));
  EXPECT_DOUBLE_EQ(calibrated.nominal_rates.remote_gpu_rate_tri_per_s,
                   40.0 * calibrated.nominal_rates.gpu_rate_tri_per_s);
  EXPECT_DOUBLE_EQ(calibrated.nominal_rates.throughput_bps, 5.0e8);
  EXPECT_DOUBLE_EQ(calibrated.mar.omega_star, 3.75);

  base.local_gpu_rate_tri_per_s = 12345678.0;
  const PipelineConfig pinned =
      to_pipeline_config(base, find_preset("d3l"), "wifi", 0.8, 1);
  EXPECT_DOUBLE_EQ(pinned.nominal_rates.gpu_rate_tri_per_s, 12345678.0);
  EXPECT_DOUBLE_EQ(pinned.nominal_rates.throughput_bps, 2.0e8);
  // The low-resolution panel spreads the same field of view over fewer
  // pixels, so the acuity floor lands higher.
  EXPECT_DOUBLE_EQ(pinned.mar.omega_star, 5.625);
  EXPECT_DOUBLE_EQ(pinned.gpu_freq_scale, 0.8);
}

TEST(MappingTablePersistence, RoundTripAndTamperChecks) {
  TempDir dir("table");
  const std::string path = (dir.path / "table.bin").string();
  const MappingTable t = make_mapping_table(0.1, 0.002);
  MotionThresholds thr;
  save_mapping_table(t, thr, path);
  ASSERT_TRUE(fs::exists(path));
  EXPECT_EQ(fs::file_size(path), 2u * kTableDepth);
  ASSERT_TRUE(fs::exists(path + ".json"));

  const MappingTable back = load_mapping_table(path);
  EXPECT_DOUBLE_EQ(back.alpha, 0.1);
  ASSERT_EQ(back.entries.size(), t.entries.size());
  EXPECT_EQ(back.entries, t.entries);
  for (std::uint32_t v : back.visits) EXPECT_EQ(v, 0u);

  // Sidecar missing.
  const std::string orphan = (dir.path / "orphan.bin").string();
  fs::copy_file(path, orphan);
  EXPECT_THROW(load_mapping_table(orphan), std::runtime_error);

  // Payload truncated.
  const std::string cut = (dir.path / "cut.bin").string();
  {
    std::ofstream out(cut, std::ios::binary);
    out << "abcd";
    std::ofstream side(cut + ".json");
    side << "{\"schema\":\"qvr.liwc-table.v1\",\"alpha\":0.1}\n";
  }
  EXPECT_THROW(load_mapping_table(cut), std::runtime_error);

  // Foreign sidecar schema.
  const std::string alien = (dir.path / "alien.bin").string();
  fs::copy_file(path, alien);
  {
    std::ofstream side(alien + ".json");
    side << "{\"schema\":\"qvr.liwc-table.v2\",\"alpha\":0.1}\n";
  }
  EXPECT_THROW(load_mapping_table(alien), std::invalid_argument);
}

TEST(MetricMatrixCsv, RoundTripAndWidthCheck) {
  TempDir dir("matrix");
  MetricMatrix m;
  m.metric = "mean_e1_deg_qvr";
  m.presets = {"d3h", "d3l"};
  m.rows.push_back({1.0, "wifi", {10.5, 22.25}});
  m.rows.push_back({0.8, "lte4g", {30.0, 44.125}});
  const std::string path = (dir.path / "m.csv").string();
  write_matrix_csv(m, path);
  const MetricMatrix back = read_matrix_csv(path);
  EXPECT_EQ(back.metric, "mean_e1_deg_qvr");
  ASSERT_EQ(back.presets, m.presets);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(back.rows[1].gpu_freq_scale, 0.8);
  EXPECT_EQ(back.rows[1].network, "lte4g");
  EXPECT_DOUBLE_EQ(back.rows[0].values[1], 22.25);

  MetricMatrix ragged = m;
  ragged.rows[0].values.pop_back();
  EXPECT_THROW(write_matrix_csv(ragged, (dir.path / "r.csv").string()),
               std::invalid_argument);
  EXPECT_THROW(read_matrix_csv((dir.path / "missing.csv").string()),
               std::runtime_error);
}

TEST(FractionPlot, ColumnsAreMonotonePerPreset) {
  TempDir dir("plot");
  const std::string path = (dir.path / "f.csv").string();
  write_fraction_plot_csv({"viking", "sponza"}, path);
  std::ifstream in(path);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "# schema: qvr.plot.v1 plot=fraction_vs_eccentricity");
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "e_deg,viking,sponza");
  double prev1 = 0.0, prev2 = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    const double v1 = std::stod(cell);
    std::getline(ss, cell, ',');
    const double v2 = std::stod(cell);
    EXPECT_GE(v1, prev1);
    EXPECT_GE(v2, prev2);
    EXPECT_LE(v1, 1.0 + 1e-12);
    prev1 = v1;
    prev2 = v2;
    ++rows;
  }
  EXPECT_EQ(rows, 45);
}

TEST(Sweep, SmallGridProducesOneCellPerPoint) {
  SimConfig base;
  SweepSpec spec;
  spec.presets = {"foveated3d", "d3l"};
  spec.networks = {"early5g"};
  spec.gpu_freq_scales = {1.0};
  spec.modes = {"qvr", "local_only"};
  spec.frames = 30;
  const SweepResult sweep = run_sweep(base, spec);
  ASSERT_EQ(sweep.cells.size(), 4u);
  const RunSummary* s = sweep.find("d3l", "early5g", 1.0, Mode::qvr);
  ASSERT_NE(s, nullptr);
  EXPECT_EQ(s->frames, 30);
  EXPECT_EQ(s->preset, "d3l");
  EXPECT_EQ(sweep.find("d3l", "wifi", 1.0, Mode::qvr), nullptr);

  EXPECT_THROW(sweep_matrix(sweep, Mode::qvr, "median_smile"),
               std::invalid_argument);
  EXPECT_THROW(sweep_matrix(sweep, Mode::dfr, "mean_e1_deg"),
               std::runtime_error);
  const MetricMatrix m = sweep_matrix(sweep, Mode::qvr, "mean_e1_deg");
  ASSERT_EQ(m.rows.size(), 1u);
  EXPECT_EQ(m.rows[0].values.size(), 2u);
}

TEST(Sweep, ArtifactsValidateAndAreDeterministic) {
  SimConfig base;
  SweepSpec spec;
  spec.presets = {"foveated3d"};
  spec.networks = {"early5g"};
  spec.gpu_freq_scales = {1.0};
  spec.modes = {"qvr"};
  spec.frames = 20;
  TempDir dir("sweep_art");
  const std::string d1 = (dir.path / "run1").string();
  const std::string d2 = (dir.path / "run2").string();
  write_sweep_artifacts(run_sweep(base, spec), d1);
  write_sweep_artifacts(run_sweep(base, spec), d2);
  EXPECT_TRUE(fs::exists(d1 + "/matrix_mean_e1_deg_qvr.csv"));
  EXPECT_TRUE(fs::exists(d1 + "/matrix_total_bytes_qvr.csv"));
  EXPECT_TRUE(fs::exists(d1 + "/plots/fraction_vs_eccentricity.csv"));
  EXPECT_TRUE(fs::exists(d1 + "/plots/fps_by_mode.csv"));
  EXPECT_TRUE(fs::exists(d1 + "/plots/bytes_by_mode.csv"));
  const auto issues = validate_dir(d1);
  for (const auto& i : issues) ADD_FAILURE() << i.file << ": " << i.message;
  EXPECT_EQ(slurp(d1 + "/summary.json"), slurp(d2 + "/summary.json"));
}

TEST(Simulation, WritesTheFullArtifactSet) {
  TempDir dir("sim");
  SimulateOptions opt;
  opt.preset = "viking";
  opt.network = "wifi";
  opt.mode = Mode::qvr;
  opt.table_out = (dir.path / "trained.bin").string();
  const Trace trace = generate_trace(parse_trace_spec("viking:20"));
  const std::string out = (dir.path / "out").string();
  const RunResult res = run_simulation(opt, trace, out);
  EXPECT_EQ(res.reports.size(), 20u);
  EXPECT_TRUE(fs::exists(out + "/frames.csv"));
  EXPECT_TRUE(fs::exists(out + "/summary.json"));
  EXPECT_TRUE(fs::exists(out + "/config.json"));
  EXPECT_EQ(slurp(out + "/frames.csv").rfind("# schema: qvr.frames.v1\n", 0),
            0u);
  const auto issues = validate_dir(out);
  for (const auto& i : issues) ADD_FAILURE() << i.file << ": " << i.message;
  ASSERT_TRUE(fs::exists(opt.table_out));

  // Warm start from the trained table.
  SimulateOptions warm = opt;
  warm.table_in = opt.table_out;
  warm.table_out.clear();
  const RunResult res2 =
      run_simulation(warm, trace, (dir.path / "out2").string());
  EXPECT_EQ(res2.reports.size(), 20u);
}

TEST(Validation, FlagsForeignAndBrokenFiles) {
  TempDir dir("validate");
  {
    std::ofstream bad(dir.path / "bad.json");
    bad << "{not json";
    std::ofstream naked(dir.path / "naked.csv");
    naked << "a,b\n1,2\n";
    std::ofstream tagless(dir.path / "tagless.json");
    tagless << "{\"x\": 1}\n";
    std::ofstream fine(dir.path / "fine.csv");
    fine << "# schema: qvr.plot.v1 plot=test\nx\n";
    std::ofstream ignored(dir.path / "notes.txt");
    ignored << "anything\n";
  }
  const auto issues = validate_dir(dir.str());
  EXPECT_EQ(issues.size(), 3u);
  const auto missing = validate_dir((dir.path / "ghost").string());
  ASSERT_EQ(missing.size(), 1u);
  EXPECT_EQ(missing[0].message, "directory does not exist");
}

}  // namespace
}  // namespace qvr
