// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>

namespace qvr {

// IEEE 754 binary16 conversion. The controller's mapping table stores its
// entries in half precision, so every stored value must round-trip through
// these exact conversions (round-to-nearest-even on the way down).

inline std::uint16_t float_to_half(float f) {
  std::uint32_t x;
  std::memcpy(&x, &f, 4);
  const std::uint32_t sign = (x >> 16) & 0x8000u;
  x &= 0x7fffffffu;

  if (x >= 0x7f800000u) {  // inf or nan
    const std::uint32_t mantissa = x & 0x7fffffu;
    return static_cast<std::uint16_t>(sign | 0x7c00u | (mantissa ? 0x200u : 0));
  }
  if (x >= 0x477ff000u) {  // overflows half range -> inf
    return static_cast<std::uint16_t>(sign | 0x7c00u);
  }
  if (x < 0x38800000u) {  // subnormal half (or zero)
    if (x < 0x33000000u) return static_cast<std::uint16_t>(sign);
    const int shift = 126 - static_cast<int>(x >> 23);
    std::uint32_t mantissa = (x & 0x7fffffu) | 0x800000u;
    const std::uint32_t q = mantissa >> shift;
    const std::uint32_t rem = mantissa & ((1u << shift) - 1);
    const std::uint32_t half = 1u << (shift - 1);
    std::uint32_t out = q;
    if (rem > half || (rem == half && (q & 1u))) out += 1;
    return static_cast<std::uint16_t>(sign | out);
  }
  // Normal case: rebias exponent, round mantissa to 10 bits.
  std::uint32_t out = ((x >> 13) & 0x3ffu) | ((((x >> 23) - 112u) & 0x1fu) << 10);
  const std::uint32_t rem = x & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (out & 1u))) out += 1;
  return static_cast<std::uint16_t>(sign | out);
}

inline float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
  const std::uint32_t exp = (h >> 10) & 0x1fu;
  const std::uint32_t mant = h & 0x3ffu;
  std::uint32_t x;
  if (exp == 0) {
    if (mant == 0) {
      x = sign;
    } else {  // subnormal: renormalize
      int e = -1;
      std::uint32_t m = mant;
      while (!(m & 0x400u)) {
        m <<= 1;
        ++e;
      }
      x = sign | static_cast<std::uint32_t>(112 - e) << 23 | ((m & 0x3ffu) << 13);
    }
  } else if (exp == 0x1fu) {
    x = sign | 0x7f800000u | (mant << 13);
  } else {
    x = sign | ((exp + 112u) << 23) | (mant << 13);
  }
  float f;
  std::memcpy(&f, &x, 4);
  return f;
}

// Value after a store-to-half round trip.
inline float quantize_half(float f) { return half_to_float(float_to_half(f)); }

}  // namespace qvr
