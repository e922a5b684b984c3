// Copyright 2026 The anonfix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "anonfix/image.hpp"

namespace anonfix {

struct ColorLab {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Planar full-range BT.601 YCbCr with zero-centred chroma.
struct ImageYCbCr {
  int height = 0;
  int width = 0;
  std::vector<double> y;
  std::vector<double> cb;
  std::vector<double> cr;
};

enum class ChromaChannel { kCb, kCr };

inline const std::vector<double>& channel(const ImageYCbCr& img,
                                          ChromaChannel c) {
  return c == ChromaChannel::kCb ? img.cb : img.cr;
}
inline std::vector<double>& channel(ImageYCbCr& img, ChromaChannel c) {
  return c == ChromaChannel::kCb ? img.cb : img.cr;
}

inline constexpr double kCbScale = 1.772;  // 2 * (1 - 0.114)
inline constexpr double kCrScale = 1.402;  // 2 * (1 - 0.299)

inline ImageYCbCr rgb_to_ycbcr(const ImageF& img) {
  ImageYCbCr out;
  out.height = img.height();
  out.width = img.width();
  const std::size_t n = img.pixel_count();
  out.y.resize(n);
  out.cb.resize(n);
  out.cr.resize(n);
  auto px = img.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = px[3 * i];
    const double g = px[3 * i + 1];
    const double b = px[3 * i + 2];
    const double y = kLumaWeights[0] * r + kLumaWeights[1] * g +
                     kLumaWeights[2] * b;
    out.y[i] = y;
    out.cb[i] = (b - y) / kCbScale;
    out.cr[i] = (r - y) / kCrScale;
  }
  return out;
}

/// Exact inverse of rgb_to_ycbcr without clamping.
inline ImageF ycbcr_to_rgb_unclamped(const ImageYCbCr& img) {
  ImageF out(img.height, img.width);
  auto px = out.values();
  for (std::size_t i = 0; i < img.y.size(); ++i) {
    const double y = img.y[i];
    const double r = y + kCrScale * img.cr[i];
    const double b = y + kCbScale * img.cb[i];
    const double g =
        (y - kLumaWeights[0] * r - kLumaWeights[2] * b) / kLumaWeights[1];
    px[3 * i] = r;
    px[3 * i + 1] = g;
    px[3 * i + 2] = b;
  }
  return out;
}

inline ImageF ycbcr_to_rgb(const ImageYCbCr& img) {
  return clamp01(ycbcr_to_rgb_unclamped(img));
}

namespace detail {

// sRGB primaries (IEC 61966-2-1 four-digit matrix) and the D65 white point
// from its CIE 1931 chromaticity (0.3127, 0.3290).
inline constexpr std::array<std::array<double, 3>, 3> kSrgbToXyz = {{
    {0.4124, 0.3576, 0.1805},
    {0.2126, 0.7152, 0.0722},
    {0.0193, 0.1192, 0.9505},
}};
inline constexpr double kD65x = 0.3127;
inline constexpr double kD65y = 0.3290;
inline constexpr std::array<double, 3> kD65White = {
    kD65x / kD65y, 1.0, (1.0 - kD65x - kD65y) / kD65y};

inline double srgb_decode(double v) noexcept {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) noexcept {
  constexpr double delta = 6.0 / 29.0;
  constexpr double epsilon = delta * delta * delta;
  return t > epsilon ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

inline double degrees(double rad) noexcept {
  return rad * 180.0 / std::numbers::pi;
}
inline double radians(double deg) noexcept {
  return deg * std::numbers::pi / 180.0;
}

}  // namespace detail

/// sRGB (display-referred, [0,1]) to CIE L*a*b* under D65.
inline ColorLab rgb_to_lab(double r, double g, double b) noexcept {
  const double rl = detail::srgb_decode(r);
  const double gl = detail::srgb_decode(g);
  const double bl = detail::srgb_decode(b);
  const auto& m = detail::kSrgbToXyz;
  const double x = m[0][0] * rl + m[0][1] * gl + m[0][2] * bl;
  const double y = m[1][0] * rl + m[1][1] * gl + m[1][2] * bl;
  const double z = m[2][0] * rl + m[2][1] * gl + m[2][2] * bl;
  const double fx = detail::lab_f(x / detail::kD65White[0]);
  const double fy = detail::lab_f(y / detail::kD65White[1]);
  const double fz = detail::lab_f(z / detail::kD65White[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline std::vector<ColorLab> rgb_to_lab(const ImageF& img) {
  std::vector<ColorLab> out(img.pixel_count());
  auto px = img.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = rgb_to_lab(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
  }
  return out;
}

inline double delta_L(const ColorLab& c1, const ColorLab& c2) noexcept {
  return std::abs(c1.L - c2.L);
}

inline double delta_C(const ColorLab& c1, const ColorLab& c2) noexcept {
  return std::abs(std::hypot(c1.a, c1.b) - std::hypot(c2.a, c2.b));
}

/**
 * @brief CIEDE2000 colour difference with kL = kC = kH = 1.
 *
 * Follows the reference formulation including the a*-rescaling factor G,
 * the mean-hue discontinuity handling at 180 degrees, and the rotation
 * term R_T.
 */
inline double delta_E2000(const ColorLab& c1, const ColorLab& c2) noexcept {
  using detail::degrees;
  using detail::radians;

  const double c1_ab = std::hypot(c1.a, c1.b);
  const double c2_ab = std::hypot(c2.a, c2.b);
  const double c_bar = 0.5 * (c1_ab + c2_ab);
  const double c_bar7 = std::pow(c_bar, 7.0);
  const double g =
      0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + std::pow(25.0, 7.0))));

  const double a1p = (1.0 + g) * c1.a;
  const double a2p = (1.0 + g) * c2.a;
  const double c1p = std::hypot(a1p, c1.b);
  const double c2p = std::hypot(a2p, c2.b);

  auto hue = [](double b, double ap) {
    if (b == 0.0 && ap == 0.0) return 0.0;
    double h = degrees(std::atan2(b, ap));
    return h < 0.0 ? h + 360.0 : h;
  };
  const double h1p = hue(c1.b, a1p);
  const double h2p = hue(c2.b, a2p);

  const double dLp = c2.L - c1.L;
  const double dCp = c2p - c1p;

  double dhp = 0.0;
  if (c1p * c2p != 0.0) {
    dhp = h2p - h1p;
    if (dhp > 180.0) {
      dhp -= 360.0;
    } else if (dhp < -180.0) {
      dhp += 360.0;
    }
  }
  const double dHp = 2.0 * std::sqrt(c1p * c2p) * std::sin(radians(dhp / 2.0));

  const double L_bar = 0.5 * (c1.L + c2.L);
  const double cp_bar = 0.5 * (c1p + c2p);

  double hp_bar = h1p + h2p;
  if (c1p * c2p != 0.0) {
    if (std::abs(h1p - h2p) <= 180.0) {
      hp_bar *= 0.5;
    } else if (h1p + h2p < 360.0) {
      hp_bar = 0.5 * (h1p + h2p + 360.0);
    } else {
      hp_bar = 0.5 * (h1p + h2p - 360.0);
    }
  }

  const double t = 1.0 - 0.17 * std::cos(radians(hp_bar - 30.0)) +
                   0.24 * std::cos(radians(2.0 * hp_bar)) +
                   0.32 * std::cos(radians(3.0 * hp_bar + 6.0)) -
                   0.20 * std::cos(radians(4.0 * hp_bar - 63.0));
  const double d_theta =
      30.0 * std::exp(-std::pow((hp_bar - 275.0) / 25.0, 2.0));
  const double cp_bar7 = std::pow(cp_bar, 7.0);
  const double r_c = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + std::pow(25.0, 7.0)));
  const double l50 = (L_bar - 50.0) * (L_bar - 50.0);
  const double s_l = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
  const double s_c = 1.0 + 0.045 * cp_bar;
  const double s_h = 1.0 + 0.015 * cp_bar * t;
  const double r_t = -std::sin(radians(2.0 * d_theta)) * r_c;

  const double lt = dLp / s_l;
  const double ct = dCp / s_c;
  const double ht = dHp / s_h;
  return std::sqrt(lt * lt + ct * ct + ht * ht + r_t * ct * ht);
}

}  // namespace anonfix
