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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anonfix/errors.hpp"
#include "anonfix/pyramid.hpp"
#include "test_support.hpp"

namespace anonfix {
namespace {

using testing::random_image;

TEST(Pyramid, MaxLevels) {
  EXPECT_EQ(max_pyramid_levels(64, 64), 6);
  EXPECT_EQ(max_pyramid_levels(2, 100), 1);
  EXPECT_EQ(max_pyramid_levels(1, 100), 0);
  EXPECT_EQ(max_pyramid_levels(31, 40), 4);
}

TEST(Pyramid, ConstantImageHasEmptyBands) {
  const ImageF c(64, 64, 0.55);
  const auto pyr = build_laplacian(c, 4);
  ASSERT_EQ(pyr.depth(), 4);
  for (const auto& band : pyr.levels)
    for (double v : band.values()) EXPECT_LE(std::abs(v), 1e-6);
  for (double v : pyr.base.values()) EXPECT_NEAR(v, 0.55, 1e-12);
  EXPECT_EQ(pyr.base.height(), 4);
  EXPECT_LT(max_abs_diff(reconstruct(pyr), c), 1e-12);
}

TEST(Pyramid, SingleLevelDefinition) {
  std::mt19937_64 rng(20);
  const ImageF img = random_image(17, 12, rng);
  const auto pyr = build_laplacian(img, 1);
  const ImageF down = downsample2(img);
  EXPECT_EQ(pyr.base, down);
  EXPECT_EQ(pyr.levels[0], img - upsample2(down, 17, 12));
}

TEST(Pyramid, LevelDimensionsFollowCeilRule) {
  const auto pyr = build_laplacian(GrayImage(45, 30), 3);
  EXPECT_EQ(pyr.levels[0].height(), 45);
  EXPECT_EQ(pyr.levels[1].height(), 23);
  EXPECT_EQ(pyr.levels[2].height(), 12);
  EXPECT_EQ(pyr.base.height(), 6);
  EXPECT_EQ(pyr.base.width(), 4);
}

TEST(Pyramid, RoundTripRandomImages) {
  std::mt19937_64 rng(21);
  for (auto [h, w] : {std::pair{64, 64}, {37, 53}, {16, 17}}) {
    const ImageF img = random_image(h, w, rng);
    for (int k = 1; k <= 4; ++k) {
      EXPECT_LE(max_abs_diff(reconstruct(build_laplacian(img, k)), img), 1e-5)
          << h << "x" << w << " K=" << k;
    }
  }
}

TEST(Pyramid, BandEnergyAccountsForImage) {
  // Summing the bands through reconstruction recovers the image, so the
  // bands are not all zero for a textured input and the base carries the mean.
  std::mt19937_64 rng(22);
  const ImageF img = random_image(32, 32, rng);
  const auto pyr = build_laplacian(img, 3);
  double band_energy = 0.0;
  for (const auto& b : pyr.levels)
    for (double v : b.values()) band_energy += v * v;
  EXPECT_GT(band_energy, 1.0);
  EXPECT_LE(max_abs_diff(reconstruct_unclamped(pyr), img), 1e-12);
}

TEST(Pyramid, Linearity) {
  std::mt19937_64 rng(23);
  for (double a : {-1.5, 0.3, 2.0, 7.0}) {
    const ImageF x = random_image(40, 40, rng);
    const ImageF lhs = reconstruct_unclamped(build_laplacian(a * x, 4));
    const ImageF rhs = a * reconstruct_unclamped(build_laplacian(x, 4));
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-6);
  }
}

TEST(Pyramid, ReconstructClampsOnlyAtTheEnd) {
  ImageF img(16, 16, 0.5);
  img(8, 8, 0) = 1.0;
  img(8, 9, 0) = 0.0;
  const auto pyr = build_laplacian(img, 2);
  bool signed_band = false;
  for (double v : pyr.levels[0].values()) signed_band |= v < 0;
  EXPECT_TRUE(signed_band);
  EXPECT_EQ(reconstruct(pyr), clamp01(reconstruct_unclamped(pyr)));
}

TEST(Pyramid, Errors) {
  EXPECT_THROW(build_laplacian(ImageF(64, 64), 0), InputError);
  EXPECT_THROW(build_laplacian(ImageF(8, 8), 4), ShapeError);
  LaplacianPyramid<3> empty;
  EXPECT_THROW(reconstruct(empty), ShapeError);
  auto pyr = build_laplacian(ImageF(16, 16), 2);
  pyr.base = ImageF(3, 3);
  EXPECT_THROW(reconstruct(pyr), ShapeError);
}

TEST(Blend, IdenticalSourcesAreIdentity) {
  std::mt19937_64 rng(24);
  const ImageF img = random_image(64, 48, rng);
  EXPECT_LE(max_abs_diff(blend_low_frequency(img, img), img), 1e-5);
  EXPECT_LE(max_abs_diff(blend_low_frequency(img, img, {2, 1}), img), 1e-5);
}

TEST(Blend, ConstantDetailGivesExpandedLightBase) {
  std::mt19937_64 rng(25);
  const ImageF light = random_image(40, 40, rng);
  const int k = 3;
  const ImageF out = blend_low_frequency(ImageF(40, 40, 0.3), light, {k, 0});
  // Oracle: expand the light residual back to full size with no detail.
  ImageF expected = build_laplacian(light, k).base;
  const int dims[] = {40, 20, 10};
  for (int i = k - 1; i >= 0; --i) {
    expected = upsample2(expected, dims[i], dims[i]);
  }
  EXPECT_LE(max_abs_diff(out, clamp01(expected)), 1e-12);
}

TEST(Blend, LowPassFollowsLightSource) {
  const int n = 128;
  const int k = 4;
  ImageF flat(n, n);
  ImageF lit(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double tex = 0.6 + 0.15 * std::sin(0.9 * x) * std::sin(0.7 * y);
      const double shade = 0.2 + 0.75 * x / (n - 1.0);
      for (int c = 0; c < 3; ++c) {
        const double a = tex * (0.9 - 0.15 * c);
        flat(y, x, c) = a * 0.6;
        lit(y, x, c) = a * shade;
      }
    }
  const ImageF out = blend_low_frequency(flat, lit, {k, 0});
  const double sigma = std::pow(2.0, k);
  const ImageF lo_out = testing::gaussian_blur(out, sigma);
  const ImageF lo_lit = testing::gaussian_blur(lit, sigma);
  const ImageF lo_flat = testing::gaussian_blur(flat, sigma);
  double err = 0.0;
  double err_flat = 0.0;
  for (std::size_t i = 0; i < out.values().size(); ++i) {
    err += std::abs(lo_out.values()[i] - lo_lit.values()[i]);
    err_flat += std::abs(lo_flat.values()[i] - lo_lit.values()[i]);
  }
  err /= out.values().size();
  err_flat /= out.values().size();
  EXPECT_LT(err, 0.02);
  EXPECT_GT(err_flat, 0.05);  // the fixture actually tests something
}

TEST(Blend, Errors) {
  EXPECT_THROW(blend_low_frequency(ImageF(32, 32), ImageF(32, 31)), ShapeError);
  EXPECT_THROW(blend_low_frequency(ImageF(32, 32), ImageF(32, 32), {0, 0}),
               InputError);
  EXPECT_THROW(blend_low_frequency(ImageF(32, 32), ImageF(32, 32), {2, 3}),
               InputError);
  EXPECT_THROW(blend_low_frequency(ImageF(8, 8), ImageF(8, 8), {4, 0}),
               ShapeError);
}

}  // namespace
}  // namespace anonfix
