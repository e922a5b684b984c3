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
#include <string>
#include <vector>

#include "anonfix/errors.hpp"
#include "anonfix/image.hpp"

namespace anonfix {

/**
 * @brief Band-pass decomposition L^1..L^K (finest first) plus the coarse
 * Gaussian residual G^{K+1}.
 */
template <int C>
struct LaplacianPyramid {
  std::vector<Image<C>> levels;
  Image<C> base;

  int depth() const noexcept { return static_cast<int>(levels.size()); }
};

/// Largest K for which build_laplacian accepts an image of this size.
inline int max_pyramid_levels(int height, int width) {
  int k = 0;
  const int m = std::min(height, width);
  while ((2 << k) <= m) ++k;
  return k;
}

template <int C>
LaplacianPyramid<C> build_laplacian(const Image<C>& img, int levels) {
  if (levels < 1) {
    throw InputError("pyramid depth must be >= 1, got " +
                     std::to_string(levels));
  }
  if (levels > max_pyramid_levels(img.height(), img.width())) {
    throw ShapeError("image " + std::to_string(img.height()) + "x" +
                     std::to_string(img.width()) + " too small for " +
                     std::to_string(levels) + " pyramid levels");
  }
  LaplacianPyramid<C> pyr;
  pyr.levels.reserve(levels);
  Image<C> current = img;
  for (int k = 0; k < levels; ++k) {
    Image<C> next = downsample2(current);
    pyr.levels.push_back(
        current - upsample2(next, current.height(), current.width()));
    current = std::move(next);
  }
  pyr.base = std::move(current);
  return pyr;
}

/// Recursive Burt-Adelson reconstruction without the final clamp.
template <int C>
Image<C> reconstruct_unclamped(const LaplacianPyramid<C>& pyr) {
  if (pyr.levels.empty()) throw ShapeError("reconstruct: empty pyramid");
  Image<C> r = pyr.base;
  for (int k = pyr.depth() - 1; k >= 0; --k) {
    const Image<C>& band = pyr.levels[k];
    const int expect_h = (band.height() + 1) / 2;
    const int expect_w = (band.width() + 1) / 2;
    if (r.height() != expect_h || r.width() != expect_w) {
      throw ShapeError("reconstruct: inconsistent pyramid dimensions at level " +
                       std::to_string(k + 1));
    }
    r = upsample2(r, band.height(), band.width()) + band;
  }
  return r;
}

template <int C>
Image<C> reconstruct(const LaplacianPyramid<C>& pyr) {
  return clamp01(reconstruct_unclamped(pyr));
}

struct BlendOptions {
  int levels = 4;
  /// Coarsest band-pass levels also taken from the lighting source, in
  /// addition to the Gaussian residual. 0 replaces the residual only.
  int replaced_bands = 0;
};

/**
 * @brief Low-frequency substitution: detail bands from detail_src, coarse
 * residual (and optionally the coarsest bands) from light_src.
 */
template <int C>
Image<C> blend_low_frequency(const Image<C>& detail_src,
                             const Image<C>& light_src,
                             const BlendOptions& opts = {}) {
  require_same_shape(detail_src, light_src, "blend_low_frequency");
  if (opts.replaced_bands < 0 || opts.replaced_bands > opts.levels) {
    throw InputError("replaced_bands must lie in [0, levels]");
  }
  LaplacianPyramid<C> out = build_laplacian(detail_src, opts.levels);
  LaplacianPyramid<C> light = build_laplacian(light_src, opts.levels);
  out.base = std::move(light.base);
  for (int i = 0; i < opts.replaced_bands; ++i) {
    const int k = opts.levels - 1 - i;
    out.levels[k] = std::move(light.levels[k]);
  }
  return reconstruct(out);
}

}  // namespace anonfix
