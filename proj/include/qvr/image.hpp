// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qvr {

// RGB image with float channels in [0, 1], row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;  // 3 * width * height

  static Image make(int w, int h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("image dims must be positive");
    Image im;
    im.width = w;
    im.height = h;
    im.rgb.assign(static_cast<std::size_t>(w) * h * 3, 0.0f);
    return im;
  }

  float* px(int x, int y) {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const float* px(int x, int y) const {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  std::array<float, 3> get(int x, int y) const {
    const float* p = px(x, y);
    return {p[0], p[1], p[2]};
  }

  void set(int x, int y, const std::array<float, 3>& c) {
    float* p = px(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }
};

inline std::uint8_t to_byte(float v) {
  if (v <= 0.0f) return 0;
  if (v >= 1.0f) return 255;
  return static_cast<std::uint8_t>(v * 255.0f + 0.5f);
}

// Binary 8-bit PPM (P6), maxval 255.
inline void save_ppm(const Image& im, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << "P6\n" << im.width << " " << im.height << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(im.width) * 3);
  for (int y = 0; y < im.height; ++y) {
    for (int x = 0; x < im.width; ++x) {
      const float* p = im.px(x, y);
      row[static_cast<std::size_t>(x) * 3 + 0] = to_byte(p[0]);
      row[static_cast<std::size_t>(x) * 3 + 1] = to_byte(p[1]);
      row[static_cast<std::size_t>(x) * 3 + 2] = to_byte(p[2]);
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
  }
  if (!f) throw std::runtime_error("short write: " + path);
}

inline Image load_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  std::string magic;
  f >> magic;
  if (magic != "P6") throw std::runtime_error("not a binary ppm: " + path);
  const auto next_int = [&f, &path]() {
    // Skip whitespace and '#' comment lines between header fields.
    int c = f.get();
    while (c == '#' || std::isspace(c)) {
      if (c == '#')
        while (c != '\n' && c != EOF) c = f.get();
      c = f.get();
    }
    int v = 0;
    bool any = false;
    while (std::isdigit(c)) {
      v = v * 10 + (c - '0');
      any = true;
      c = f.get();
    }
    if (!any) throw std::runtime_error("malformed ppm header: " + path);
    return v;
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (maxval != 255) throw std::runtime_error("ppm maxval must be 255: " + path);
  Image im = Image::make(w, h);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * 3);
  f.read(reinterpret_cast<char*>(buf.data()),
         static_cast<std::streamsize>(buf.size()));
  if (f.gcount() != static_cast<std::streamsize>(buf.size()))
    throw std::runtime_error("truncated ppm payload: " + path);
  for (std::size_t i = 0; i < buf.size(); ++i)
    im.rgb[i] = static_cast<float>(buf[i]) / 255.0f;
  return im;
}

}  // namespace qvr
