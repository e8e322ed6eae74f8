// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qvr/perfmodel.hpp"

namespace qvr {

struct DisplayConfig {
  int width_px = 1920;
  int height_px = 2160;
  double horizontal_fov_deg = 120.0;
  int bytes_per_pixel = 3;
  int eyes = 2;

  // Linear degree-to-pixel mapping across the horizontal field of view.
  double pixels_per_degree() const { return width_px / horizontal_fov_deg; }
};

inline void validate(const DisplayConfig& d) {
  if (d.width_px <= 0 || d.height_px <= 0)
    throw std::invalid_argument("display dimensions must be positive");
  if (!(d.horizontal_fov_deg > 0) || d.horizontal_fov_deg > 180)
    throw std::invalid_argument("horizontal fov must be in (0, 180]");
  if (d.bytes_per_pixel <= 0)
    throw std::invalid_argument("bytes_per_pixel must be positive");
  if (d.eyes != 2) throw std::invalid_argument("display must be two-eyed");
}

// Eccentricity of the display corner as seen from the display centre; the
// outer bound for every eccentricity parameter.
inline double corner_eccentricity_deg(const DisplayConfig& d) {
  return std::hypot(d.width_px / 2.0, d.height_px / 2.0) /
         d.pixels_per_degree();
}

// Minimum-angle-of-resolution line: slope per degree of eccentricity plus
// the foveal floor, both in arcmin, against the display's own resolving
// angle.
struct MarParams {
  double m = 1.32;          // arcmin per degree of eccentricity
  double omega0 = 1.25;     // arcmin at the fovea centre
  double omega_star = 0.0;  // arcmin resolvable by the display; 0 = derive
};

inline void validate(const MarParams& p) {
  if (!(p.m >= 0) || !(p.omega0 > 0) || !(p.omega_star > 0))
    throw std::invalid_argument("mar parameters must be positive");
  if (p.omega_star < p.omega0)
    throw std::invalid_argument("display mar must be at least the foveal mar");
}

inline MarParams resolve_mar(MarParams p, const DisplayConfig& d) {
  if (p.omega_star <= 0) p.omega_star = 60.0 / d.pixels_per_degree();
  validate(p);
  return p;
}

// Acuity-derived sampling scale at eccentricity e: how many display pixels
// one rendered pixel may span there. Never below 1 (the display floor).
inline double mar_scale(double e_deg, const MarParams& mar) {
  validate(mar);
  if (!(e_deg >= 0)) throw std::invalid_argument("eccentricity must be >= 0");
  return std::max(1.0, (mar.m * e_deg + mar.omega0) / mar.omega_star);
}

// Area of the intersection of a disc with the display rectangle
// [0, w] x [0, h]. Exact up to floating point: the row-span integrand is
// split at the radii where the chord endpoints cross the rectangle's
// vertical edges and each smooth piece is integrated in closed form.
inline double disc_rect_intersection_area(double cx, double cy, double radius,
                                          double w, double h) {
  if (!(radius >= 0)) throw std::invalid_argument("radius must be >= 0");
  if (radius == 0 || w <= 0 || h <= 0) return 0.0;
  const double r = radius;
  // Rectangle in circle-centred coordinates.
  const double x0 = -cx, x1 = w - cx;
  const double y0 = -cy, y1 = h - cy;
  const double ylo = std::max(y0, -r), yhi = std::min(y1, r);
  if (ylo >= yhi) return 0.0;

  // Antiderivative of the half-chord width sqrt(r^2 - y^2).
  const auto iw = [r](double y) {
    const double t = std::clamp(y / r, -1.0, 1.0);
    return 0.5 * (y * std::sqrt(std::max(0.0, r * r - y * y)) +
                  r * r * std::asin(t));
  };

  std::vector<double> cuts{ylo, yhi};
  for (double x : {x0, x1}) {
    if (std::fabs(x) < r) {
      const double yc = std::sqrt(r * r - x * x);
      for (double y : {-yc, yc})
        if (y > ylo && y < yhi) cuts.push_back(y);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (b - a <= 0) continue;
    const double ym = 0.5 * (a + b);
    const double wm = std::sqrt(std::max(0.0, r * r - ym * ym));
    const double left = std::max(x0, -wm);
    const double right = std::min(x1, wm);
    if (right <= left) continue;
    // Each bound is either a rectangle edge (constant) or the circle (Iw).
    double seg = 0.0;
    seg += (x1 < wm) ? x1 * (b - a) : iw(b) - iw(a);
    seg -= (x0 > -wm) ? x0 * (b - a) : -(iw(b) - iw(a));
    area += seg;
  }
  return area;
}

// Fovea configuration for one frame: inner eccentricity, the derived
// middle/outer split, and the gaze point the discs are centred on.
struct EccentricityState {
  double e1_deg = 5.0;
  double e2_star_deg = 0.0;
  double center_x_px = 0.0;
  double center_y_px = 0.0;
};

inline void validate(const EccentricityState& s, const DisplayConfig& d,
                     double e_min_deg = 5.0, double e_max_deg = 45.0) {
  if (s.e1_deg < e_min_deg || s.e1_deg > e_max_deg)
    throw std::invalid_argument("e1 outside configured bounds");
  if (s.e2_star_deg < s.e1_deg)
    throw std::invalid_argument("e2* must not be below e1");
  if (s.center_x_px < 0 || s.center_x_px > d.width_px || s.center_y_px < 0 ||
      s.center_y_px > d.height_px)
    throw std::invalid_argument("fovea centre outside display");
}

// Modeled transmission cost of the periphery, in display pixels, for a given
// (e1, e2) split: each layer's clipped area shrunk by the square of its
// acuity scale. Clipping assumes a centred gaze; the candidate scan below
// shares this assumption.
inline double periphery_pixel_cost(double e1_deg, double e2_deg,
                                   const MarParams& mar,
                                   const DisplayConfig& disp) {
  const double ppd = disp.pixels_per_degree();
  const double cx = disp.width_px / 2.0, cy = disp.height_px / 2.0;
  const double w = disp.width_px, h = disp.height_px;
  const double a1 = disc_rect_intersection_area(cx, cy, e1_deg * ppd, w, h);
  const double a2 = disc_rect_intersection_area(cx, cy, e2_deg * ppd, w, h);
  const double s1 = mar_scale(e1_deg, mar);
  const double s2 = mar_scale(e2_deg, mar);
  const double middle = std::max(0.0, a2 - a1);
  const double outer = std::max(0.0, w * h - a2);
  return middle / (s1 * s1) + outer / (s2 * s2);
}

struct E2Selection {
  double e2_star_deg = 0.0;
  double cost_px = 0.0;
};

// Pick the middle/outer boundary that minimises the periphery transmission
// cost, scanning one-degree steps from just past e1 out to the display
// corner (the corner itself is always a candidate). Ties go to the smaller
// boundary. A fovea that already covers the whole display short-circuits to
// the corner at zero cost.
inline E2Selection select_e2_star(double e1_deg, const MarParams& mar,
                                  const DisplayConfig& disp) {
  validate(disp);
  if (!(e1_deg >= 0)) throw std::invalid_argument("e1 must be >= 0");
  const double corner = corner_eccentricity_deg(disp);
  if (e1_deg > corner + 1e-9)
    throw std::invalid_argument("e1 beyond display corner eccentricity");

  const double ppd = disp.pixels_per_degree();
  const double full = static_cast<double>(disp.width_px) * disp.height_px;
  const double cx = disp.width_px / 2.0, cy = disp.height_px / 2.0;
  const double covered = disc_rect_intersection_area(
      cx, cy, e1_deg * ppd, disp.width_px, disp.height_px);
  if (covered >= full * (1.0 - 1e-12)) return {corner, 0.0};

  std::vector<double> candidates;
  for (double e2 = e1_deg + 1.0; e2 < corner - 1e-9; e2 += 1.0)
    candidates.push_back(e2);
  candidates.push_back(corner);

  E2Selection best{candidates.front(),
                   periphery_pixel_cost(e1_deg, candidates.front(), mar, disp)};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double c = periphery_pixel_cost(e1_deg, candidates[i], mar, disp);
    if (c < best.cost_px) best = {candidates[i], c};
  }
  return best;
}

// Pixel-space consequence of an eccentricity state: layer radii, per-layer
// acuity scales, and how much of the display the fovea disc claims.
struct LayerGeometry {
  double fovea_radius_px = 0.0;
  double middle_outer_radius_px = 0.0;
  double s1 = 1.0;
  double s2 = 1.0;
  double fovea_area_fraction = 0.0;
  double center_x_px = 0.0;
  double center_y_px = 0.0;
  int display_width_px = 0;
  int display_height_px = 0;
};

inline LayerGeometry layer_geometry(const EccentricityState& ecc,
                                    const MarParams& mar,
                                    const DisplayConfig& disp) {
  validate(disp);
  if (ecc.e2_star_deg < ecc.e1_deg)
    throw std::invalid_argument("e2* must not be below e1");
  const double ppd = disp.pixels_per_degree();
  LayerGeometry g;
  g.fovea_radius_px = ecc.e1_deg * ppd;
  g.middle_outer_radius_px = ecc.e2_star_deg * ppd;
  g.s1 = mar_scale(ecc.e1_deg, mar);
  g.s2 = mar_scale(ecc.e2_star_deg, mar);
  g.center_x_px = ecc.center_x_px;
  g.center_y_px = ecc.center_y_px;
  g.display_width_px = disp.width_px;
  g.display_height_px = disp.height_px;
  g.fovea_area_fraction =
      disc_rect_intersection_area(ecc.center_x_px, ecc.center_y_px,
                                  g.fovea_radius_px, disp.width_px,
                                  disp.height_px) /
      (static_cast<double>(disp.width_px) * disp.height_px);
  return g;
}

// Build a geometry directly from pixel measurements; used where eccentricity
// state is not meaningful (image-space tests and tools).
inline LayerGeometry layer_geometry_px(double cx, double cy, double r1_px,
                                       double r2_px, double s1, double s2,
                                       int width_px, int height_px) {
  if (r1_px < 0 || r2_px < r1_px)
    throw std::invalid_argument("radii must satisfy 0 <= r1 <= r2");
  LayerGeometry g;
  g.fovea_radius_px = r1_px;
  g.middle_outer_radius_px = r2_px;
  g.s1 = s1;
  g.s2 = s2;
  g.center_x_px = cx;
  g.center_y_px = cy;
  g.display_width_px = width_px;
  g.display_height_px = height_px;
  g.fovea_area_fraction =
      disc_rect_intersection_area(cx, cy, r1_px, width_px, height_px) /
      (static_cast<double>(width_px) * height_px);
  return g;
}

// Share of the frame's workload density that falls inside the fovea disc.
// A cell counts when its centre is inside the disc.
inline double fovea_workload_fraction(const SceneFrame& scene,
                                      const LayerGeometry& geom) {
  if (!scene.density) throw std::invalid_argument("scene has no density field");
  const DensityField& d = *scene.density;
  if (d.cols <= 0 || d.rows <= 0 ||
      d.cells.size() != static_cast<std::size_t>(d.cols) * d.rows)
    throw std::invalid_argument("malformed density field");
  if (!d.normalized())
    throw std::invalid_argument("density field is not normalized");
  const double w = geom.display_width_px, h = geom.display_height_px;
  const double r2 = geom.fovea_radius_px * geom.fovea_radius_px;
  double acc = 0.0;
  for (int j = 0; j < d.rows; ++j) {
    const double yc = (j + 0.5) * h / d.rows - geom.center_y_px;
    for (int i = 0; i < d.cols; ++i) {
      const double xc = (i + 0.5) * w / d.cols - geom.center_x_px;
      if (xc * xc + yc * yc <= r2) acc += d.at(i, j);
    }
  }
  // A disc covering every cell sums the whole field, which can land a few
  // ulps above one.
  return std::min(acc, 1.0);
}

// Compressed size of the middle and outer layers for both eyes, in bytes.
// Layer areas are clipped to the display rectangle around the actual gaze
// point before being shrunk by the squared acuity scales.
inline std::int64_t periphery_bytes(const LayerGeometry& geom,
                                    const DisplayConfig& disp,
                                    double compression_ratio) {
  validate(disp);
  if (!(compression_ratio > 0) || compression_ratio > 1)
    throw std::invalid_argument("compression_ratio must be in (0, 1]");
  if (!(geom.s1 >= 1) || !(geom.s2 >= geom.s1))
    throw std::invalid_argument("layer scales must satisfy 1 <= s1 <= s2");
  const double w = disp.width_px, h = disp.height_px;
  const double a1 = disc_rect_intersection_area(
      geom.center_x_px, geom.center_y_px, geom.fovea_radius_px, w, h);
  const double a2 = disc_rect_intersection_area(
      geom.center_x_px, geom.center_y_px, geom.middle_outer_radius_px, w, h);
  const double middle = std::max(0.0, a2 - a1) / (geom.s1 * geom.s1);
  const double outer = std::max(0.0, w * h - a2) / (geom.s2 * geom.s2);
  const double raw =
      disp.eyes * disp.bytes_per_pixel * compression_ratio * (middle + outer);
  return static_cast<std::int64_t>(std::ceil(raw));
}

}  // namespace qvr
