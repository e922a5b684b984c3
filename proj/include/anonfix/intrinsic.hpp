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
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "anonfix/errors.hpp"
#include "anonfix/image.hpp"

namespace anonfix {

/// Floor applied to shading so that albedo = image / shading stays finite.
inline constexpr double kShadingFloor = 1e-3;
/// Ceiling applied to albedo after division.
inline constexpr double kAlbedoMax = 4.0;

/// Single-channel illumination estimate, values in [kShadingFloor, 1].
struct ShadingMap {
  GrayImage data;
  int height() const noexcept { return data.height(); }
  int width() const noexcept { return data.width(); }
};

/// Three-channel reflectance estimate, values in [0, kAlbedoMax].
struct AlbedoMap {
  ImageF data;
  int height() const noexcept { return data.height(); }
  int width() const noexcept { return data.width(); }
};

struct Decomposition {
  AlbedoMap albedo;
  ShadingMap shading;
};

/**
 * @brief Parameters of the Gaussian bilateral filter.
 *
 * A non-positive sigma_spatial means "2% of the image diagonal" and a
 * non-positive radius means ceil(2 * sigma_spatial); both are resolved
 * against the image size by resolved().
 */
struct BilateralParams {
  double sigma_spatial = 0.0;
  double sigma_range = 0.1;
  int radius = 0;

  static constexpr double kDiagonalFraction = 0.02;

  BilateralParams resolved(int height, int width) const {
    BilateralParams p = *this;
    if (p.sigma_spatial <= 0.0) {
      p.sigma_spatial =
          kDiagonalFraction * std::hypot(static_cast<double>(height), width);
    }
    if (p.radius <= 0) {
      p.radius = std::max(1, static_cast<int>(std::ceil(2.0 * p.sigma_spatial)));
    }
    if (!(p.sigma_range > 0.0) || !std::isfinite(p.sigma_spatial)) {
      throw InputError("bilateral parameters must be strictly positive");
    }
    return p;
  }
};

namespace detail {

// exp(x) for -80 <= x <= 0 with relative error below 3e-7. Written without
// library calls or float selects so the bilateral inner loops vectorize.
struct FastExp {
  float operator()(float x) const noexcept;
};

// Exact fallback for parameter sets whose exponents leave FastExp's range.
struct LibmExp {
  float operator()(float x) const noexcept { return std::exp(x); }
};

inline float FastExp::operator()(float x) const noexcept {
  const float shifted = x * 1.44269504f + 12582912.0f;  // 1.5 * 2^23
  const float n_float = shifted - 12582912.0f;
  std::int32_t n = std::bit_cast<std::int32_t>(shifted) - 0x4B400000;
  n = n < -126 ? -126 : n;
  const float r = x - n_float * 0.693145751953125f -
                  n_float * 1.428606765330187e-06f;
  float p = 1.0f / 720.0f;
  p = p * r + 1.0f / 120.0f;
  p = p * r + 1.0f / 24.0f;
  p = p * r + 1.0f / 6.0f;
  p = p * r + 0.5f;
  p = p * r + 1.0f;
  p = p * r + 1.0f;
  return p * std::bit_cast<float>((n + 127) << 23);
}

// Weighted accumulation for one neighbour offset over x in [x0, x1):
// weight(x) = exp(-(d^2 * range_k + spatial_term)), d = center[x] - nbr[x].
template <typename Exp>
inline void accumulate_one_sided(const float* __restrict center,
                                 const float* __restrict nbr, int x0, int x1,
                                 float range_k, float spatial_term,
                                 float* __restrict num,
                                 float* __restrict den) {
  for (int x = x0; x < x1; ++x) {
    const float d = center[x] - nbr[x];
    const float w = Exp{}(-(d * d * range_k + spatial_term));
    num[x] += w * nbr[x];
    den[x] += w;
  }
}

// Same pair weight credited to both ends: pixel x of the centre row and
// pixel x + nbr_shift of the neighbour row.
template <typename Exp>
inline void accumulate_symmetric(const float* __restrict center,
                                 const float* __restrict nbr, int x0, int x1,
                                 float range_k, float spatial_term,
                                 float* __restrict num, float* __restrict den,
                                 float* __restrict nbr_num,
                                 float* __restrict nbr_den, int nbr_shift) {
  for (int x = x0; x < x1; ++x) {
    const float c = center[x];
    const float q = nbr[x];
    const float d = c - q;
    const float w = Exp{}(-(d * d * range_k + spatial_term));
    num[x] += w * q;
    den[x] += w;
    nbr_num[x + nbr_shift] += w * c;
    nbr_den[x + nbr_shift] += w;
  }
}

}  // namespace detail

namespace detail {

template <typename Exp>
void bilateral_accumulate(const std::vector<float>& padded, int h, int w,
                          int r, float range_k, double spatial_k,
                          std::vector<double>& num, std::vector<double>& den) {
  const int pw = w + 2 * r;
  auto padded_row = [&](int y) {
    return &padded[static_cast<std::size_t>(y + r) * pw + r];
  };

  std::vector<int> half_width(r + 1);
  for (int dy = 0; dy <= r; ++dy) {
    half_width[dy] = static_cast<int>(
        std::floor(std::sqrt(static_cast<double>(r) * r - dy * dy) + 1e-9));
  }

  std::vector<float> row_num(w), row_den(w), nbr_num(w), nbr_den(w);
  auto flush = [&](std::vector<float>& pn, std::vector<float>& pd, int y) {
    double* n = &num[static_cast<std::size_t>(y) * w];
    double* d = &den[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      n[x] += pn[x];
      d[x] += pd[x];
    }
    std::fill(pn.begin(), pn.end(), 0.0f);
    std::fill(pd.begin(), pd.end(), 0.0f);
  };

  for (int y = 0; y < h; ++y) {
    const float* center = padded_row(y);
    {
      double* n = &num[static_cast<std::size_t>(y) * w];
      double* d = &den[static_cast<std::size_t>(y) * w];
      for (int x = 0; x < w; ++x) {
        n[x] += center[x];
        d[x] += 1.0;
      }
    }

    // Offsets (dy, dx) of the forward half plane: dy > 0, or dy == 0, dx > 0.
    for (int dy = 0; dy <= r; ++dy) {
      const int hw = half_width[dy];
      const int ny = y + dy;
      const bool forward_row_inside = ny < h;
      const bool backward_row_inside = y - dy >= 0;
      for (int dx = dy == 0 ? 1 : -hw; dx <= hw; ++dx) {
        const float spatial =
            static_cast<float>((dx * dx + dy * dy) * spatial_k);

        // Forward offset (dy, dx).
        const float* fwd = padded_row(ny) + dx;
        const int x_lo = std::min(w, std::max(0, -dx));
        const int x_hi = std::max(0, std::min(w, w - dx));
        if (forward_row_inside) {
          if (x_lo < x_hi) {
            accumulate_symmetric<Exp>(center, fwd, x_lo, x_hi, range_k,
                                      spatial, row_num.data(), row_den.data(),
                                      nbr_num.data(), nbr_den.data(), dx);
          }
          accumulate_one_sided<Exp>(center, fwd, 0, x_lo, range_k, spatial,
                                    row_num.data(), row_den.data());
          accumulate_one_sided<Exp>(center, fwd, std::max(x_lo, x_hi), w,
                                    range_k, spatial, row_num.data(),
                                    row_den.data());
        } else {
          accumulate_one_sided<Exp>(center, fwd, 0, w, range_k, spatial,
                                    row_num.data(), row_den.data());
        }

        // Backward offset (-dy, -dx). In-image partners were credited while
        // they were the centre pixel; only replicated-border samples remain.
        const float* bwd = padded_row(y - dy) - dx;
        if (backward_row_inside) {
          const int bx_lo = std::min(w, std::max(0, dx));
          const int bx_hi = std::max(0, std::min(w, w + dx));
          accumulate_one_sided<Exp>(center, bwd, 0, bx_lo, range_k, spatial,
                                    row_num.data(), row_den.data());
          accumulate_one_sided<Exp>(center, bwd, std::max(bx_lo, bx_hi), w,
                                    range_k, spatial, row_num.data(),
                                    row_den.data());
        } else {
          accumulate_one_sided<Exp>(center, bwd, 0, w, range_k, spatial,
                                    row_num.data(), row_den.data());
        }
      }
      if (forward_row_inside) flush(nbr_num, nbr_den, ny);
      flush(row_num, row_den, y);
    }
  }
}

}  // namespace detail

/**
 * @brief Brute-force Gaussian bilateral filter over a circular window.
 *
 * out(p) = sum_q ws(|p-q|) wr(|I_p - I_q|) I_q / sum_q ws wr, with q ranging
 * over offsets of length <= radius and out-of-image samples taken from the
 * replicated border. Each in-image pair weight is evaluated once and
 * credited to both pixels. Partial sums are kept in float per window row
 * and folded into double accumulators in a fixed order, so the result does
 * not depend on scheduling.
 */
inline GrayImage bilateral_filter(const GrayImage& img,
                                  const BilateralParams& params) {
  const BilateralParams p = params.resolved(img.height(), img.width());
  const int h = img.height();
  const int w = img.width();
  const int r = p.radius;
  const int pw = w + 2 * r;

  double lo = img.values()[0];
  double hi = lo;
  for (double v : img.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  std::vector<float> padded(static_cast<std::size_t>(h + 2 * r) * pw);
  for (int y = -r; y < h + r; ++y) {
    const int sy = detail::clamp_index(y, h);
    float* dst = &padded[static_cast<std::size_t>(y + r) * pw];
    for (int x = -r; x < w + r; ++x) {
      dst[x + r] = static_cast<float>(img(sy, detail::clamp_index(x, w)));
    }
  }

  const double range_k = 1.0 / (2.0 * p.sigma_range * p.sigma_range);
  const double spatial_k = 1.0 / (2.0 * p.sigma_spatial * p.sigma_spatial);
  const double max_exponent =
      (hi - lo) * (hi - lo) * range_k + double(r) * r * spatial_k;

  std::vector<double> num(static_cast<std::size_t>(h) * w, 0.0);
  std::vector<double> den(static_cast<std::size_t>(h) * w, 0.0);
  if (max_exponent <= 80.0) {
    detail::bilateral_accumulate<detail::FastExp>(
        padded, h, w, r, static_cast<float>(range_k), spatial_k, num, den);
  } else {
    detail::bilateral_accumulate<detail::LibmExp>(
        padded, h, w, r, static_cast<float>(range_k), spatial_k, num, den);
  }

  // Convex combination; the clamp only removes float rounding at the ends.
  GrayImage out(h, w);
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = std::clamp(num[i] / den[i], lo, hi);
  }
  return out;
}

/// Retinex-style split: shading is the clamped bilateral-filtered luma,
/// albedo the clamped per-channel ratio image / shading.
inline Decomposition decompose(const ImageF& img,
                               const BilateralParams& params = {}) {
  GrayImage s = bilateral_filter(to_gray(img), params);
  for (double& v : s.values()) v = std::clamp(v, kShadingFloor, 1.0);

  ImageF a(img.height(), img.width());
  auto src = img.values();
  auto sv = s.values();
  auto dst = a.values();
  for (std::size_t i = 0; i < sv.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      dst[3 * i + c] = std::clamp(src[3 * i + c] / sv[i], 0.0, kAlbedoMax);
    }
  }
  return {AlbedoMap{std::move(a)}, ShadingMap{std::move(s)}};
}

inline ImageF recompose(const AlbedoMap& albedo, const ShadingMap& shading) {
  require_same_shape(albedo.data, shading.data, "recompose");
  ImageF out(albedo.height(), albedo.width());
  auto a = albedo.data.values();
  auto s = shading.data.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      dst[3 * i + c] = std::clamp(a[3 * i + c] * s[i], 0.0, 1.0);
    }
  }
  return out;
}

/// Albedo of the anonymized face under the shading of the original.
inline ImageF relight(const AlbedoMap& albedo_anon,
                      const ShadingMap& shading_orig) {
  return recompose(albedo_anon, shading_orig);
}

/// Wraps an externally estimated shading image, applying the same clamp as
/// decompose().
inline ShadingMap shading_from_gray(GrayImage g) {
  for (double& v : g.values()) v = std::clamp(v, kShadingFloor, 1.0);
  return ShadingMap{std::move(g)};
}

}  // namespace anonfix
