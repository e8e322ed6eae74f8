// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#include "qvr/perfmodel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qvr/rng.hpp"

namespace qvr {
namespace {

RateEstimates default_rates() {
  RateEstimates r;
  r.gpu_rate_tri_per_s = 2.0e7;
  r.remote_gpu_rate_tri_per_s = 8.0e8;
  r.throughput_bps = 2.0e8;
  return r;
}

TEST(DensityField, NormalizationCheck) {
  DensityField d;
  d.cols = 2;
  d.rows = 2;
  d.cells = {0.25, 0.25, 0.25, 0.25};
  EXPECT_TRUE(d.normalized());
  EXPECT_DOUBLE_EQ(d.sum(), 1.0);
  EXPECT_DOUBLE_EQ(d.at(1, 1), 0.25);

  d.cells = {0.5, 0.25, 0.25, 0.25};
  EXPECT_FALSE(d.normalized());
  d.cells = {-0.25, 0.5, 0.5, 0.25};  // sums to 1 but has a negative cell
  EXPECT_FALSE(d.normalized());
}

TEST(LocalLatency, TriangleCountOverRate) {
  SceneFrame scene;
  scene.triangles = 1000000;
  EXPECT_DOUBLE_EQ(predict_local_latency(scene, 0.25, default_rates()),
                   0.0125);
  EXPECT_DOUBLE_EQ(predict_local_latency(scene, 0.0, default_rates()), 0.0);
  scene.triangles = 0;
  EXPECT_DOUBLE_EQ(predict_local_latency(scene, 1.0, default_rates()), 0.0);
}

TEST(LocalLatency, RejectsBadInputs) {
  SceneFrame scene;
  scene.triangles = -1;
  EXPECT_THROW(predict_local_latency(scene, 0.5, default_rates()),
               std::invalid_argument);
  scene.triangles = 100;
  EXPECT_THROW(predict_local_latency(scene, 1.5, default_rates()),
               std::invalid_argument);
  EXPECT_THROW(predict_local_latency(scene, -0.1, default_rates()),
               std::invalid_argument);
  RateEstimates r = default_rates();
  r.gpu_rate_tri_per_s = 0.0;
  EXPECT_THROW(predict_local_latency(scene, 0.5, r), std::invalid_argument);
}

TEST(RemoteLatency, BytesOverThroughputPlusOverhead) {
  // 530 KiB on a 200 Mb/s link.
  EXPECT_DOUBLE_EQ(predict_remote_latency(530 * 1024, default_rates()),
                   0.0217088);
  EXPECT_DOUBLE_EQ(predict_remote_latency(530 * 1024, default_rates(), 0.0093),
                   0.0093 + 0.0217088);
  EXPECT_DOUBLE_EQ(predict_remote_latency(0, default_rates(), 0.02), 0.02);
}

TEST(RemoteLatency, RejectsBadInputs) {
  EXPECT_THROW(predict_remote_latency(-1, default_rates()),
               std::invalid_argument);
  EXPECT_THROW(predict_remote_latency(100, default_rates(), -0.1),
               std::invalid_argument);
  RateEstimates r = default_rates();
  r.throughput_bps = 0.0;
  EXPECT_THROW(predict_remote_latency(100, r), std::invalid_argument);
}

TEST(LatencyEstimate, DeltaIsRemoteMinusLocal) {
  const LatencyEstimate est = make_latency_estimate(0.004, 0.0105);
  EXPECT_DOUBLE_EQ(est.t_local_s, 0.004);
  EXPECT_DOUBLE_EQ(est.t_remote_s, 0.0105);
  EXPECT_DOUBLE_EQ(est.delta_s, 0.0065);
}

TEST(Fps, BoundByTheSlowerStage) {
  EXPECT_DOUBLE_EQ(fps(0.01, 0.02), 50.0);
  EXPECT_DOUBLE_EQ(fps(0.02, 0.01), 50.0);
  EXPECT_DOUBLE_EQ(fps(0.005, 0.005), 200.0);
  EXPECT_THROW(fps(0.0, 0.01), std::invalid_argument);
  EXPECT_THROW(fps(0.01, -1.0), std::invalid_argument);
}

TEST(RateValidation, RejectsNonPositiveFields) {
  RateEstimates r = default_rates();
  EXPECT_NO_THROW(validate(r));
  r.alpha = 0.0;
  EXPECT_THROW(validate(r), std::invalid_argument);
  r = default_rates();
  r.alpha = 1.1;
  EXPECT_THROW(validate(r), std::invalid_argument);
  r = default_rates();
  r.remote_gpu_rate_tri_per_s = -1.0;
  EXPECT_THROW(validate(r), std::invalid_argument);
}

TEST(UpdateEstimates, GeometricConvergenceClosedForm) {
  RateEstimates r = default_rates();
  r.alpha = 0.2;
  r.gpu_rate_tri_per_s = 1.0e7;
  // Constant measurement of 3e7 tri/s for seven frames.
  for (int k = 0; k < 7; ++k)
    r = update_estimates(r, 0.001, 0.001, 30000, 25000);
  const double w = std::pow(0.8, 7);
  EXPECT_NEAR(r.gpu_rate_tri_per_s, w * 1.0e7 + (1.0 - w) * 3.0e7, 1e-3);
  EXPECT_NEAR(r.gpu_rate_tri_per_s, 25805696.0, 1e-3);
  // Throughput smooths toward 8 * 25000 / 0.001 = 2e8, its starting value.
  EXPECT_NEAR(r.throughput_bps, 2.0e8, 1e-3);
}

TEST(UpdateEstimates, StaysInsideTheMeasurementHull) {
  SplitMix rng(42);
  for (int k = 0; k < 1000; ++k) {
    RateEstimates r = default_rates();
    r.alpha = rng.next_range(0.01, 1.0);
    r.gpu_rate_tri_per_s = rng.next_range(1e6, 1e8);
    r.throughput_bps = rng.next_range(1e7, 1e9);
    const double t_local = rng.next_range(1e-4, 0.05);
    const double t_tx = rng.next_range(1e-4, 0.05);
    const auto tri = static_cast<std::int64_t>(rng.next_range(1e3, 1e7));
    const auto bytes = static_cast<std::int64_t>(rng.next_range(1e3, 1e7));
    const RateEstimates out = update_estimates(r, t_local, t_tx, tri, bytes);

    const double gpu_meas = static_cast<double>(tri) / t_local;
    EXPECT_GE(out.gpu_rate_tri_per_s,
              std::min(r.gpu_rate_tri_per_s, gpu_meas) - 1e-6);
    EXPECT_LE(out.gpu_rate_tri_per_s,
              std::max(r.gpu_rate_tri_per_s, gpu_meas) + 1e-6);
    const double tp_meas = 8.0 * static_cast<double>(bytes) / t_tx;
    EXPECT_GE(out.throughput_bps, std::min(r.throughput_bps, tp_meas) - 1e-6);
    EXPECT_LE(out.throughput_bps, std::max(r.throughput_bps, tp_meas) + 1e-6);
    // The remote rate is not measured locally and must pass through.
    EXPECT_DOUBLE_EQ(out.remote_gpu_rate_tri_per_s, r.remote_gpu_rate_tri_per_s);
  }
}

TEST(UpdateEstimates, RejectsNonPositiveMeasurements) {
  const RateEstimates r = default_rates();
  EXPECT_THROW(update_estimates(r, 0.0, 0.001, 1000, 1000),
               std::invalid_argument);
  EXPECT_THROW(update_estimates(r, 0.001, -0.001, 1000, 1000),
               std::invalid_argument);
  EXPECT_THROW(update_estimates(r, 0.001, 0.001, 0, 1000),
               std::invalid_argument);
  EXPECT_THROW(update_estimates(r, 0.001, 0.001, 1000, -5),
               std::invalid_argument);
}

}  // namespace
}  // namespace qvr
