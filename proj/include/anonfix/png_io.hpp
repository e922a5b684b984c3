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

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anonfix/errors.hpp"
#include "anonfix/image.hpp"

namespace anonfix {

namespace detail {

// Decoded PNG samples, normalised to [0,1], before channel reduction.
struct PngRaster {
  int height = 0;
  int width = 0;
  int channels = 0;  // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  std::vector<double> samples;
};

struct PngErrorSink {
  char message[256] = "libpng error";
};

inline void png_error_to_sink(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
  if (sink != nullptr && msg != nullptr) {
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  }
  png_longjmp(png, 1);
}

inline void png_ignore_warning(png_structp, png_const_charp) {}

struct PngReadHandle {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngErrorSink sink;

  ~PngReadHandle() {
    if (png != nullptr) png_destroy_read_struct(&png, &info, nullptr);
    if (fp != nullptr) std::fclose(fp);
  }
};

struct PngWriteHandle {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngErrorSink sink;

  ~PngWriteHandle() {
    if (png != nullptr) png_destroy_write_struct(&png, &info);
    if (fp != nullptr) std::fclose(fp);
  }
};

// setjmp regions hold only trivially destructible locals.
inline bool png_read_header(PngReadHandle& h, png_uint_32& width,
                            png_uint_32& height, int& bit_depth,
                            int& channels) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_init_io(h.png, h.fp);
  png_read_info(h.png, h.info);
  const int color_type = png_get_color_type(h.png, h.info);
  const int depth = png_get_bit_depth(h.png, h.info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(h.png);
  }
  png_read_update_info(h.png, h.info);
  width = png_get_image_width(h.png, h.info);
  height = png_get_image_height(h.png, h.info);
  bit_depth = png_get_bit_depth(h.png, h.info);
  channels = png_get_channels(h.png, h.info);
  return true;
}

inline bool png_read_rows(PngReadHandle& h, png_bytepp rows) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_read_image(h.png, rows);
  png_read_end(h.png, nullptr);
  return true;
}

inline bool png_write_all(PngWriteHandle& h, png_uint_32 width,
                          png_uint_32 height, int color_type, png_bytepp rows) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_init_io(h.png, h.fp);
  png_set_IHDR(h.png, h.info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(h.png, h.info);
  png_write_image(h.png, rows);
  png_write_end(h.png, nullptr);
  return true;
}

inline PngRaster read_png(const std::filesystem::path& path) {
  PngReadHandle h;
  h.fp = std::fopen(path.string().c_str(), "rb");
  if (h.fp == nullptr) {
    throw InputError("cannot open image '" + path.string() + "'");
  }
  png_byte signature[8] = {};
  if (std::fread(signature, 1, 8, h.fp) != 8 ||
      png_sig_cmp(signature, 0, 8) != 0) {
    throw InputError("unsupported image format (not a PNG): '" +
                     path.string() + "'");
  }
  h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &h.sink,
                                 png_error_to_sink, png_ignore_warning);
  if (h.png == nullptr) throw InputError("libpng initialisation failed");
  h.info = png_create_info_struct(h.png);
  if (h.info == nullptr) throw InputError("libpng initialisation failed");
  png_set_sig_bytes(h.png, 8);

  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int channels = 0;
  if (!png_read_header(h, width, height, bit_depth, channels)) {
    throw InputError("cannot decode '" + path.string() + "': " +
                     h.sink.message);
  }
  if (width == 0 || height == 0) {
    throw InputError("zero-dimension image '" + path.string() + "'");
  }
  if (bit_depth != 8 && bit_depth != 16) {
    throw InputError("unsupported bit depth in '" + path.string() + "'");
  }

  const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;
  const std::size_t row_bytes =
      static_cast<std::size_t>(width) * channels * bytes_per_sample;
  std::vector<png_byte> buffer(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = &buffer[y * row_bytes];
  if (!png_read_rows(h, rows.data())) {
    throw InputError("cannot decode '" + path.string() + "': " +
                     h.sink.message);
  }

  PngRaster raster;
  raster.height = static_cast<int>(height);
  raster.width = static_cast<int>(width);
  raster.channels = channels;
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  raster.samples.resize(n);
  if (bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) raster.samples[i] = buffer[i] / 255.0;
  } else {
    // PNG stores 16-bit samples big-endian.
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = (unsigned{buffer[2 * i]} << 8) | buffer[2 * i + 1];
      raster.samples[i] = v / 65535.0;
    }
  }
  return raster;
}

inline std::uint8_t quantize8(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

inline void write_png8(const std::filesystem::path& path, int width,
                       int height, int channels,
                       const std::vector<png_byte>& buffer) {
  PngWriteHandle h;
  h.fp = std::fopen(path.string().c_str(), "wb");
  if (h.fp == nullptr) {
    throw InputError("cannot write image '" + path.string() + "'");
  }
  h.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &h.sink,
                                  png_error_to_sink, png_ignore_warning);
  if (h.png == nullptr) throw InputError("libpng initialisation failed");
  h.info = png_create_info_struct(h.png);
  if (h.info == nullptr) throw InputError("libpng initialisation failed");

  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels;
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(&buffer[y * row_bytes]);
  }
  const int color_type = channels == 3 ? PNG_COLOR_TYPE_RGB
                                       : PNG_COLOR_TYPE_GRAY;
  if (!png_write_all(h, static_cast<png_uint_32>(width),
                     static_cast<png_uint_32>(height), color_type,
                     rows.data())) {
    throw InputError("cannot write image '" + path.string() + "': " +
                     h.sink.message);
  }
}

}  // namespace detail

/// Loads an 8- or 16-bit PNG as RGB in [0,1]. Alpha is dropped and
/// grayscale sources are replicated across channels.
inline ImageF load_image(const std::filesystem::path& path) {
  const detail::PngRaster raster = detail::read_png(path);
  ImageF img(raster.height, raster.width);
  auto dst = img.values();
  const std::size_t pixels = img.pixel_count();
  const int ch = raster.channels;
  for (std::size_t i = 0; i < pixels; ++i) {
    const double* px = &raster.samples[i * ch];
    if (ch >= 3) {
      dst[3 * i] = px[0];
      dst[3 * i + 1] = px[1];
      dst[3 * i + 2] = px[2];
    } else {
      dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = px[0];
    }
  }
  return img;
}

/// Loads a single-channel map (shading exports, masks). Colour inputs are
/// reduced to BT.601 luma.
inline GrayImage load_gray(const std::filesystem::path& path) {
  const detail::PngRaster raster = detail::read_png(path);
  GrayImage img(raster.height, raster.width);
  auto dst = img.values();
  const int ch = raster.channels;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double* px = &raster.samples[i * ch];
    dst[i] = ch >= 3 ? kLumaWeights[0] * px[0] + kLumaWeights[1] * px[1] +
                           kLumaWeights[2] * px[2]
                     : px[0];
  }
  return img;
}

/// Mask PNG: a pixel is selected when its 8-bit gray level exceeds 127.
inline Mask load_mask(const std::filesystem::path& path) {
  const GrayImage gray = load_gray(path);
  Mask mask(gray.height(), gray.width(), false);
  auto v = gray.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    mask.selected[i] = v[i] * 255.0 > 127.5 ? 1 : 0;
  }
  return mask;
}

/// Writes 8-bit RGB; values are clamped to [0,1] and quantised by
/// round(v * 255).
inline void save_image(const ImageF& img, const std::filesystem::path& path) {
  auto src = img.values();
  std::vector<png_byte> buffer(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    buffer[i] = detail::quantize8(src[i]);
  }
  detail::write_png8(path, img.width(), img.height(), 3, buffer);
}

inline void save_gray(const GrayImage& img,
                      const std::filesystem::path& path) {
  auto src = img.values();
  std::vector<png_byte> buffer(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    buffer[i] = detail::quantize8(src[i]);
  }
  detail::write_png8(path, img.width(), img.height(), 1, buffer);
}

inline void save_mask(const Mask& mask, const std::filesystem::path& path) {
  std::vector<png_byte> buffer(mask.selected.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    buffer[i] = mask.selected[i] ? 255 : 0;
  }
  detail::write_png8(path, mask.width, mask.height, 1, buffer);
}

}  // namespace anonfix
