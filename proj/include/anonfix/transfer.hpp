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

#include <cmath>
#include <optional>

#include "anonfix/colorspace.hpp"
#include "anonfix/errors.hpp"
#include "anonfix/image.hpp"

namespace anonfix {

struct ChannelStats {
  double mean = 0.0;
  double std = 0.0;  // population (ddof = 0)
};

/// Below this target deviation the affine map degrades to a mean shift.
inline constexpr double kMinTransferStd = 1e-6;

inline ChannelStats channel_stats(const ImageYCbCr& img, ChromaChannel ch,
                                  const std::optional<Mask>& mask = {}) {
  const std::vector<double>& v = channel(img, ch);
  if (mask && (mask->height != img.height || mask->width != img.width)) {
    throw ShapeError("channel_stats: mask dimension mismatch");
  }
  std::size_t n = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    sum += v[i];
    ++n;
  }
  if (n == 0) throw InputError("channel_stats: mask selects no pixels");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    const double d = v[i] - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

/**
 * @brief Chroma statistics transfer in YCbCr, before conversion back to RGB.
 *
 * Cb and Cr of the target are mapped affinely so their mean and standard
 * deviation match the reference; Y is copied unchanged. Statistics use the
 * mask when one is given, the map is applied to every pixel.
 */
inline ImageYCbCr color_transfer_ycbcr(const ImageF& target,
                                       const ImageF& reference,
                                       const std::optional<Mask>& mask = {}) {
  require_same_shape(target, reference, "color_transfer");
  require_mask_shape(target, mask, "color_transfer");
  ImageYCbCr out = rgb_to_ycbcr(target);
  const ImageYCbCr ref = rgb_to_ycbcr(reference);
  for (ChromaChannel ch : {ChromaChannel::kCb, ChromaChannel::kCr}) {
    const ChannelStats t = channel_stats(out, ch, mask);
    const ChannelStats r = channel_stats(ref, ch, mask);
    std::vector<double>& v = channel(out, ch);
    if (t.std < kMinTransferStd) {
      for (double& x : v) x = x - t.mean + r.mean;
    } else {
      const double gain = r.std / t.std;
      for (double& x : v) x = gain * (x - t.mean) + r.mean;
    }
  }
  return out;
}

inline ImageF color_transfer(const ImageF& target, const ImageF& reference,
                             const std::optional<Mask>& mask = {}) {
  return ycbcr_to_rgb(color_transfer_ycbcr(target, reference, mask));
}

}  // namespace anonfix
