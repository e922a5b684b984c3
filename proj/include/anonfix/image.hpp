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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonfix/errors.hpp"

namespace anonfix {

/**
 * @brief Dense interleaved raster of doubles, nominal range [0,1].
 *
 * Pixels are stored row-major with channels interleaved, so the value at
 * (y, x, c) lives at index (y * width + x) * Channels + c.
 */
template <int Channels>
class Image {
  static_assert(Channels >= 1);

 public:
  static constexpr int kChannels = Channels;

  Image() = default;
  Image(int height, int width, double fill = 0.0)
      : height_(height), width_(width) {
    if (height <= 0 || width <= 0) {
      throw ShapeError("image dimensions must be positive, got " +
                       std::to_string(height) + "x" + std::to_string(width));
    }
    data_.assign(static_cast<std::size_t>(height) * width * Channels, fill);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * width_;
  }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int y, int x, int c = 0) noexcept {
    return data_[index(y, x, c)];
  }
  double operator()(int y, int x, int c = 0) const noexcept {
    return data_[index(y, x, c)];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  std::span<double> row(int y) noexcept {
    return std::span<double>(data_).subspan(
        static_cast<std::size_t>(y) * width_ * Channels,
        static_cast<std::size_t>(width_) * Channels);
  }
  std::span<const double> row(int y) const noexcept {
    return std::span<const double>(data_).subspan(
        static_cast<std::size_t>(y) * width_ * Channels,
        static_cast<std::size_t>(width_) * Channels);
  }

  template <int Other>
  bool same_shape(const Image<Other>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * Channels + c;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

using ImageF = Image<3>;
using GrayImage = Image<1>;

/// Binary selection over an image grid; also used for face-region masks.
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> selected;

  Mask() = default;
  Mask(int h, int w, bool value = true)
      : height(h), width(w),
        selected(static_cast<std::size_t>(h) * w, value ? 1 : 0) {}

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(
        std::count(selected.begin(), selected.end(), std::uint8_t{1}));
  }
  bool operator[](std::size_t i) const noexcept { return selected[i] != 0; }
};

template <int A, int B>
void require_same_shape(const Image<A>& a, const Image<B>& b,
                        const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" +
                     std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + " vs " +
                     std::to_string(b.height()) + "x" +
                     std::to_string(b.width()) + ")");
  }
}

template <int C>
void require_mask_shape(const Image<C>& img, const std::optional<Mask>& mask,
                        const char* what) {
  if (mask && (mask->height != img.height() || mask->width != img.width())) {
    throw ShapeError(std::string(what) + ": mask dimension mismatch");
  }
}

/// Number of selected pixels, treating an absent mask as all-selected.
template <int C>
std::size_t selected_count(const Image<C>& img,
                           const std::optional<Mask>& mask) {
  return mask ? mask->count() : img.pixel_count();
}

template <int C>
Image<C> operator+(const Image<C>& a, const Image<C>& b) {
  require_same_shape(a, b, "image add");
  Image<C> out = a;
  auto dst = out.values();
  auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

template <int C>
Image<C> operator-(const Image<C>& a, const Image<C>& b) {
  require_same_shape(a, b, "image subtract");
  Image<C> out = a;
  auto dst = out.values();
  auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return out;
}

template <int C>
Image<C> operator*(double s, const Image<C>& a) {
  Image<C> out = a;
  for (double& v : out.values()) v *= s;
  return out;
}

template <int C>
Image<C> clamp01(Image<C> img) {
  for (double& v : img.values()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

template <int C>
double max_abs_diff(const Image<C>& a, const Image<C>& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    m = std::max(m, x[i] > y[i] ? x[i] - y[i] : y[i] - x[i]);
  }
  return m;
}

inline constexpr std::array<double, 3> kLumaWeights = {0.299, 0.587, 0.114};

/// BT.601 full-range luma.
inline GrayImage to_gray(const ImageF& img) {
  GrayImage out(img.height(), img.width());
  auto src = img.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double y = kLumaWeights[0] * src[3 * i] +
                     kLumaWeights[1] * src[3 * i + 1] +
                     kLumaWeights[2] * src[3 * i + 2];
    dst[i] = y;
  }
  return out;
}

/// Replicates a single-channel image into three identical channels.
inline ImageF to_rgb(const GrayImage& gray) {
  ImageF out(gray.height(), gray.width());
  auto src = gray.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  }
  return out;
}

namespace detail {

// Burt-Adelson binomial taps (1,4,6,4,1)/16.
inline constexpr std::array<double, 5> kBinomial5 = {
    1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

inline int clamp_index(int i, int n) noexcept {
  return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

}  // namespace detail

/**
 * @brief Blur with the separable binomial kernel, then keep every second
 * sample starting at index 0. Edges are replicated; output dims are
 * ceil(dim / 2).
 */
template <int C>
Image<C> downsample2(const Image<C>& img) {
  const int h = img.height();
  const int w = img.width();
  if (h < 2 || w < 2) {
    throw ShapeError("downsample2: image must be at least 2x2, got " +
                     std::to_string(h) + "x" + std::to_string(w));
  }
  const int oh = (h + 1) / 2;
  const int ow = (w + 1) / 2;

  // Horizontal pass evaluated only at even columns.
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow * C, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int j = 0; j < ow; ++j) {
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int t = 0; t < 5; ++t) {
          acc += detail::kBinomial5[t] *
                 img(y, detail::clamp_index(2 * j + t - 2, w), c);
        }
        tmp[(static_cast<std::size_t>(y) * ow + j) * C + c] = acc;
      }
    }
  }

  Image<C> out(oh, ow);
  for (int i = 0; i < oh; ++i) {
    for (int j = 0; j < ow; ++j) {
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int t = 0; t < 5; ++t) {
          const int yy = detail::clamp_index(2 * i + t - 2, h);
          acc += detail::kBinomial5[t] *
                 tmp[(static_cast<std::size_t>(yy) * ow + j) * C + c];
        }
        out(i, j, c) = acc;
      }
    }
  }
  return out;
}

/**
 * @brief Zero-insertion upsampling followed by the binomial kernel scaled
 * by 2 per axis.
 *
 * Replicate padding is applied to the coarse samples before zero insertion,
 * which keeps constant images constant at the borders. Evaluated in
 * polyphase form: even outputs use taps (1,6,1)/8, odd outputs (4,4)/8.
 */
template <int C>
Image<C> upsample2(const Image<C>& img, int target_h, int target_w) {
  const int h = img.height();
  const int w = img.width();
  const bool h_ok = target_h == 2 * h || target_h == 2 * h - 1;
  const bool w_ok = target_w == 2 * w || target_w == 2 * w - 1;
  if (h <= 0 || w <= 0 || !h_ok || !w_ok) {
    throw ShapeError("upsample2: target " + std::to_string(target_h) + "x" +
                     std::to_string(target_w) + " inconsistent with input " +
                     std::to_string(h) + "x" + std::to_string(w));
  }

  auto expand = [](auto sample, int m, int n) {
    const int i = m / 2;
    if (m % 2 == 0) {
      return (sample(detail::clamp_index(i - 1, n)) + 6.0 * sample(i) +
              sample(detail::clamp_index(i + 1, n))) /
             8.0;
    }
    return 0.5 * (sample(i) + sample(detail::clamp_index(i + 1, n)));
  };

  std::vector<double> tmp(static_cast<std::size_t>(h) * target_w * C, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < target_w; ++x) {
      for (int c = 0; c < C; ++c) {
        tmp[(static_cast<std::size_t>(y) * target_w + x) * C + c] = expand(
            [&](int j) { return img(y, j, c); }, x, w);
      }
    }
  }

  Image<C> out(target_h, target_w);
  for (int y = 0; y < target_h; ++y) {
    for (int x = 0; x < target_w; ++x) {
      for (int c = 0; c < C; ++c) {
        out(y, x, c) = expand(
            [&](int i) {
              return tmp[(static_cast<std::size_t>(i) * target_w + x) * C + c];
            },
            y, h);
      }
    }
  }
  return out;
}

}  // namespace anonfix
