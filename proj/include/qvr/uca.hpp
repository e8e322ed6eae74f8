// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvr/foveation.hpp"
#include "qvr/image.hpp"

namespace qvr {

// Unified composition-and-warp model. The reference path composes the layer
// stack into a display frame and then reprojects it; the unified path fuses
// both into one gather per output pixel, which is what makes the dedicated
// hardware unit cheap. Both paths live here so they can be checked against
// each other.

enum class LayerKind { fovea = 0, middle = 1, outer = 2 };

inline const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::fovea: return "fovea";
    case LayerKind::middle: return "middle";
    case LayerKind::outer: return "outer";
  }
  return "?";
}

// A rendered layer positioned in display space: display position of layer
// pixel (i, j) is origin + scale * (i, j).
struct LayerImage {
  Image image;
  double scale = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  LayerKind kind = LayerKind::fovea;
};

inline void validate_layer_stack(const std::vector<LayerImage>& layers) {
  if (layers.empty()) throw std::invalid_argument("layer stack is empty");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!(layers[i].scale >= 1.0))
      throw std::invalid_argument("layer scale must be >= 1");
    if (layers[i].image.width <= 0 || layers[i].image.height <= 0)
      throw std::invalid_argument("layer image is empty");
    if (i > 0 && !(static_cast<int>(layers[i].kind) >
                   static_cast<int>(layers[i - 1].kind)))
      throw std::invalid_argument("layers must be sorted inner to outer");
  }
}

// Rotation-only reprojection plus radial lens distortion. Positive yaw moves
// the sampled source toward +x at the image centre, positive pitch toward
// +y, roll spins the sampling grid. focal_px <= 0 falls back to the image
// width.
struct ReprojectionMap {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  double lens_k1 = 0.0;
  double focal_px = 0.0;
};

struct SourcePos {
  double x = 0.0;
  double y = 0.0;
  bool valid = false;
};

inline SourcePos source_position(const ReprojectionMap& map, int width,
                                 int height, double out_x, double out_y) {
  const double f = map.focal_px > 0 ? map.focal_px : width;
  const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
  const double deg = 3.14159265358979323846 / 180.0;
  const double sy = std::sin(map.yaw_deg * deg), cyaw = std::cos(map.yaw_deg * deg);
  const double sp = std::sin(map.pitch_deg * deg), cp = std::cos(map.pitch_deg * deg);
  const double sr = std::sin(map.roll_deg * deg), cr = std::cos(map.roll_deg * deg);

  // Ray through the output pixel.
  double dx = (out_x - cx) / f, dy = (out_y - cy) / f, dz = 1.0;
  // Roll about the view axis.
  {
    const double tx = cr * dx - sr * dy, ty = sr * dx + cr * dy;
    dx = tx;
    dy = ty;
  }
  // Pitch: +pitch samples toward +y.
  {
    const double ty = cp * dy + sp * dz, tz = -sp * dy + cp * dz;
    dy = ty;
    dz = tz;
  }
  // Yaw: +yaw samples toward +x.
  {
    const double tx = cyaw * dx + sy * dz, tz = -sy * dx + cyaw * dz;
    dx = tx;
    dz = tz;
  }
  if (dz <= 1e-9) return {};  // source behind the projection plane

  double a = dx / dz, b = dy / dz;
  const double r2 = a * a + b * b;
  const double dist = 1.0 + map.lens_k1 * r2;
  a *= dist;
  b *= dist;
  SourcePos s;
  s.x = a * f + cx;
  s.y = b * f + cy;
  s.valid = s.x >= 0.0 && s.x <= width - 1.0 && s.y >= 0.0 && s.y <= height - 1.0;
  return s;
}

// Bilinear fetch with clamped addressing at the edges. Accumulates in double
// and rounds once on return.
inline std::array<float, 3> bilinear_sample(const Image& im, double x,
                                            double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(im.width - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(im.height - 1));
  const int x0 = std::min(static_cast<int>(cx), im.width - 1);
  const int y0 = std::min(static_cast<int>(cy), im.height - 1);
  const int x1 = std::min(x0 + 1, im.width - 1);
  const int y1 = std::min(y0 + 1, im.height - 1);
  const double fx = cx - x0, fy = cy - y0;
  const float* p00 = im.px(x0, y0);
  const float* p10 = im.px(x1, y0);
  const float* p01 = im.px(x0, y1);
  const float* p11 = im.px(x1, y1);
  std::array<float, 3> out;
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] * (1.0 - fx) + p10[c] * fx;
    const double bot = p01[c] * (1.0 - fx) + p11[c] * fx;
    out[c] = static_cast<float>(top * (1.0 - fy) + bot * fy);
  }
  return out;
}

namespace detail {

// Value a layer contributes at a display-space position.
inline std::array<float, 3> layer_fetch(const LayerImage& layer, double disp_x,
                                        double disp_y) {
  const double u = (disp_x - layer.origin_x) / layer.scale;
  const double v = (disp_y - layer.origin_y) / layer.scale;
  if (u < -0.5 || u > layer.image.width - 0.5 || v < -0.5 ||
      v > layer.image.height - 0.5)
    throw std::runtime_error(
        std::string("display pixel not covered by ") + to_string(layer.kind) +
        " layer at (" + std::to_string(disp_x) + ", " + std::to_string(disp_y) +
        ")");
  return bilinear_sample(layer.image, u, v);
}

// Boundary radii between adjacent present layers, inner to outer. The fovea
// boundary governs when the middle layer is absent.
inline std::vector<std::pair<double, std::pair<int, int>>> boundaries(
    const std::vector<LayerImage>& layers, const LayerGeometry& geom) {
  std::vector<std::pair<double, std::pair<int, int>>> out;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    const double radius = (layers[i].kind == LayerKind::fovea)
                              ? geom.fovea_radius_px
                              : geom.middle_outer_radius_px;
    out.push_back({radius, {static_cast<int>(i), static_cast<int>(i + 1)}});
  }
  return out;
}

struct PixelConfig {
  bool blend = false;
  int inner = -1;  // layer indices
  int outer = -1;
};

// Region decision for a display-space point: blend across a boundary when
// within half the band of it, otherwise the single owning layer.
inline PixelConfig classify(
    const std::vector<std::pair<double, std::pair<int, int>>>& bounds,
    double r, double blend_band_px) {
  if (blend_band_px > 0) {
    for (const auto& b : bounds) {
      if (std::fabs(r - b.first) <= blend_band_px / 2.0)
        return {true, b.second.first, b.second.second};
    }
  }
  int owner = static_cast<int>(bounds.size());  // outermost layer index
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (r < bounds[i].first) {
      owner = static_cast<int>(i);
      break;
    }
  }
  return {false, owner, owner};
}

}  // namespace detail

inline void validate_blend_geometry(
    const std::vector<LayerImage>& layers, const LayerGeometry& geom,
    double blend_band_px) {
  validate_layer_stack(layers);
  if (blend_band_px < 0)
    throw std::invalid_argument("blend band must be non-negative");
  const auto bounds = detail::boundaries(layers, geom);
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
    if (bounds[i + 1].first - bounds[i].first < blend_band_px)
      throw std::invalid_argument("blend bands of adjacent boundaries overlap");
}

// Reference composition: every display pixel copied from its owning layer,
// pixels within the blend band of a boundary averaged across the two layers
// that meet there.
inline Image compose_foveated(const std::vector<LayerImage>& layers,
                              const LayerGeometry& geom,
                              double blend_band_px) {
  validate_blend_geometry(layers, geom, blend_band_px);
  const int w = geom.display_width_px, h = geom.display_height_px;
  if (w <= 0 || h <= 0) throw std::invalid_argument("geometry has no display size");
  const auto bounds = detail::boundaries(layers, geom);
  Image out = Image::make(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = std::hypot(x - geom.center_x_px, y - geom.center_y_px);
      const auto cfg = detail::classify(bounds, r, blend_band_px);
      std::array<float, 3> c;
      if (cfg.blend) {
        const auto a = detail::layer_fetch(layers[cfg.inner], x, y);
        const auto b = detail::layer_fetch(layers[cfg.outer], x, y);
        for (int ch = 0; ch < 3; ++ch) c[ch] = 0.5f * (a[ch] + b[ch]);
      } else {
        c = detail::layer_fetch(layers[cfg.inner], x, y);
      }
      out.set(x, y, c);
    }
  }
  return out;
}

// Reprojection of a finished frame: sample the source position for every
// output pixel; out-of-bounds sources produce black.
inline Image atw(const Image& frame, const ReprojectionMap& map) {
  Image out = Image::make(frame.width, frame.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const SourcePos s = source_position(map, frame.width, frame.height, x, y);
      if (!s.valid) continue;  // stays black
      out.set(x, y, bilinear_sample(frame, s.x, s.y));
    }
  }
  return out;
}

// Equivalence oracle for the unified path: compose, then warp.
inline Image sequential_reference(const std::vector<LayerImage>& layers,
                                  const LayerGeometry& geom,
                                  const ReprojectionMap& map,
                                  double blend_band_px) {
  return atw(compose_foveated(layers, geom, blend_band_px), map);
}

enum class TileKind { interior, border };

struct Tile {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
  TileKind kind = TileKind::interior;
};

struct TilePlan {
  int tile_size = 32;
  double blend_band_px = 0.0;
  double margin_px = 0.0;
  std::vector<Tile> tiles;

  std::size_t border_count() const {
    std::size_t n = 0;
    for (const auto& t : tiles)
      if (t.kind == TileKind::border) ++n;
    return n;
  }
};

// Partition the display into tiles and mark the ones that intersect an
// inter-layer blend annulus (optionally grown by margin_px to absorb
// reprojection displacement). Classification against the annulus is exact:
// it compares the tile's min/max distance from the fovea centre with the
// annulus radii.
inline TilePlan build_tile_plan(const std::vector<LayerImage>& layers,
                                const LayerGeometry& geom,
                                double blend_band_px, int tile_size = 32,
                                double margin_px = 0.0) {
  if (tile_size <= 0) throw std::invalid_argument("tile size must be positive");
  if (margin_px < 0) throw std::invalid_argument("margin must be non-negative");
  const int w = geom.display_width_px, h = geom.display_height_px;
  if (w <= 0 || h <= 0) throw std::invalid_argument("geometry has no display size");
  const auto bounds = detail::boundaries(layers, geom);
  TilePlan plan;
  plan.tile_size = tile_size;
  plan.blend_band_px = blend_band_px;
  plan.margin_px = margin_px;
  const double reach = blend_band_px / 2.0 + margin_px;
  for (int y0 = 0; y0 < h; y0 += tile_size) {
    for (int x0 = 0; x0 < w; x0 += tile_size) {
      Tile t;
      t.x0 = x0;
      t.y0 = y0;
      t.width = std::min(tile_size, w - x0);
      t.height = std::min(tile_size, h - y0);
      // Pixel centres of this tile span [x0, x1] x [y0, y1].
      const double x1 = x0 + t.width - 1, y1 = y0 + t.height - 1;
      const double cx = geom.center_x_px, cy = geom.center_y_px;
      const double nx = std::clamp(cx, static_cast<double>(x0), x1);
      const double ny = std::clamp(cy, static_cast<double>(y0), y1);
      const double dmin = std::hypot(nx - cx, ny - cy);
      double dmax = 0.0;
      for (double px : {static_cast<double>(x0), x1})
        for (double py : {static_cast<double>(y0), y1})
          dmax = std::max(dmax, std::hypot(px - cx, py - cy));
      if (blend_band_px > 0) {
        for (const auto& b : bounds) {
          if (dmin <= b.first + reach && dmax >= b.first - reach) {
            t.kind = TileKind::border;
            break;
          }
        }
      }
      plan.tiles.push_back(t);
    }
  }
  return plan;
}

// Largest source displacement the reprojection induces, probed on a coarse
// grid; used to widen border-tile classification so the single-layer fast
// path never silently crosses a blend band.
inline double max_displacement_px(const ReprojectionMap& map, int width,
                                  int height, int step = 8) {
  double worst = 0.0;
  for (int y = 0; y < height; y += step) {
    for (int x = 0; x < width; x += step) {
      const SourcePos s = source_position(map, width, height, x, y);
      if (s.valid) worst = std::max(worst, std::hypot(s.x - x, s.y - y));
    }
  }
  return worst + 1.0;
}

// One-pass composition + reprojection. For each output pixel the source
// position is classified against the blend geometry; border-tile pixels in a
// blend band take the fused trilinear gather (four taps, two layers, shared
// weights), everything else a bilinear gather from the single owning layer.
// Interior tiles skip the band test entirely; that is the hardware fast
// path, and the tile plan's margin keeps it honest.
inline Image unified_uca(const std::vector<LayerImage>& layers,
                         const LayerGeometry& geom, const ReprojectionMap& map,
                         double blend_band_px, const TilePlan& plan) {
  validate_blend_geometry(layers, geom, blend_band_px);
  const int w = geom.display_width_px, h = geom.display_height_px;
  const auto bounds = detail::boundaries(layers, geom);
  Image out = Image::make(w, h);

  const auto gather = [&](const LayerImage& layer, double sx, double sy,
                          const LayerImage* second) -> std::array<float, 3> {
    // Shared bilinear tap positions and weights around (sx, sy), clamped the
    // same way a direct bilinear fetch of a composed frame would clamp.
    const double cxs = std::clamp(sx, 0.0, static_cast<double>(w - 1));
    const double cys = std::clamp(sy, 0.0, static_cast<double>(h - 1));
    const int x0 = std::min(static_cast<int>(cxs), w - 1);
    const int y0 = std::min(static_cast<int>(cys), h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = cxs - x0, fy = cys - y0;
    const int tx[4] = {x0, x1, x0, x1};
    const int ty[4] = {y0, y0, y1, y1};
    const double tw[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy,
                          fx * fy};
    std::array<double, 3> acc{0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      if (tw[i] == 0.0) continue;
      auto v = detail::layer_fetch(layer, tx[i], ty[i]);
      if (second) {
        const auto v2 = detail::layer_fetch(*second, tx[i], ty[i]);
        for (int c = 0; c < 3; ++c) v[c] = 0.5f * (v[c] + v2[c]);
      }
      for (int c = 0; c < 3; ++c) acc[c] += tw[i] * v[c];
    }
    return {static_cast<float>(acc[0]), static_cast<float>(acc[1]),
            static_cast<float>(acc[2])};
  };

  for (const Tile& tile : plan.tiles) {
    for (int y = tile.y0; y < tile.y0 + tile.height; ++y) {
      for (int x = tile.x0; x < tile.x0 + tile.width; ++x) {
        const SourcePos s = source_position(map, w, h, x, y);
        if (!s.valid) continue;
        const double r =
            std::hypot(s.x - geom.center_x_px, s.y - geom.center_y_px);
        detail::PixelConfig cfg;
        if (tile.kind == TileKind::border) {
          cfg = detail::classify(bounds, r, blend_band_px);
        } else {
          cfg = detail::classify(bounds, r, 0.0);
        }
        if (cfg.blend) {
          out.set(x, y, gather(layers[cfg.inner], s.x, s.y, &layers[cfg.outer]));
        } else {
          out.set(x, y, gather(layers[cfg.inner], s.x, s.y, nullptr));
        }
      }
    }
  }
  return out;
}

// Cost model of the dedicated unit: fixed cycles per tile, a few parallel
// tile engines, one clock domain.
struct UcaCostModel {
  std::int64_t cycles_per_tile = 532;
  int units = 2;
  double freq_hz = 5.0e8;
};

inline void validate(const UcaCostModel& c) {
  if (c.cycles_per_tile <= 0 || c.units <= 0 || !(c.freq_hz > 0))
    throw std::invalid_argument("cost model fields must be positive");
}

inline double uca_latency(std::int64_t tile_count, const UcaCostModel& cost) {
  validate(cost);
  if (tile_count < 0) throw std::invalid_argument("tile count must be >= 0");
  const std::int64_t waves = (tile_count + cost.units - 1) / cost.units;
  return static_cast<double>(waves * cost.cycles_per_tile) / cost.freq_hz;
}

inline double uca_latency(const TilePlan& plan, const UcaCostModel& cost) {
  return uca_latency(static_cast<std::int64_t>(plan.tiles.size()), cost);
}

// Tiles needed for one full frame on every eye.
inline std::int64_t frame_tile_count(const DisplayConfig& disp,
                                     int tile_size = 32) {
  const std::int64_t tx = (disp.width_px + tile_size - 1) / tile_size;
  const std::int64_t ty = (disp.height_px + tile_size - 1) / tile_size;
  return disp.eyes * tx * ty;
}

}  // namespace qvr
