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
#include "anonfix/metrics.hpp"
#include "test_support.hpp"

namespace anonfix {
namespace {

using testing::random_gray;
using testing::random_image;

// Direct evaluation of ||o - alpha a||^2 / N on a grid of alphas.
double grid_si_mse(const ImageF& o, const ImageF& a, double step = 1e-4) {
  auto ov = o.values();
  auto av = a.values();
  double best = INFINITY;
  const int steps = static_cast<int>(std::lround(4.0 / step));
  for (int k = 0; k <= steps; ++k) {
    const double alpha = k * step;
    double s = 0.0;
    for (std::size_t i = 0; i < ov.size(); ++i) {
      const double d = ov[i] - alpha * av[i];
      s += d * d;
    }
    best = std::min(best, s);
  }
  return best / static_cast<double>(o.pixel_count());
}

TEST(SiMse, IdenticalAndScaled) {
  std::mt19937_64 rng(50);
  const ImageF img = random_image(16, 16, rng);
  EXPECT_EQ(si_mse(img, img).value, 0.0);
  const ScaleInvariantResult r = si_mse(img, 2.0 * img);
  EXPECT_LE(r.value, 1e-10);
  EXPECT_NEAR(r.alpha, 0.5, 1e-15);
}

TEST(SiMse, HandExample) {
  // Flattened o = (1,0,0,0), a = (0.5,0.5,0,0) over 4 pixels.
  ImageF o(1, 4);
  ImageF a(1, 4);
  o(0, 0, 0) = 1.0;
  a(0, 0, 0) = 0.5;
  a(0, 1, 0) = 0.5;
  const ScaleInvariantResult r = si_mse(o, a);
  EXPECT_DOUBLE_EQ(r.alpha, 1.0);
  EXPECT_DOUBLE_EQ(r.value, 0.5 / 4);
  EXPECT_NEAR(grid_si_mse(o, a), r.value, 1e-6);
}

TEST(SiMse, MatchesGridOracle) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 10; ++t) {
    const ImageF o = random_image(16, 16, rng);
    const ImageF a = random_image(16, 16, rng);
    EXPECT_NEAR(si_mse(o, a).value, grid_si_mse(o, a), 1e-6);
  }
}

TEST(SiMse, MaskRestrictsSelection) {
  std::mt19937_64 rng(52);
  const ImageF o = random_image(4, 4, rng);
  ImageF a = o;
  Mask m(4, 4, true);
  a(3, 3, 1) = 0.0;  // disagreement outside the mask
  m.selected[15] = 0;
  EXPECT_LE(si_mse(o, a, m).value, 1e-20);
  EXPECT_GT(si_mse(o, a).value, 0.0);
}

TEST(SiMse, ZeroTestImageIsDegenerate) {
  const ImageF o(2, 2, 0.5);
  const ScaleInvariantResult r = si_mse(o, ImageF(2, 2, 0.0));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.alpha, 0.0);
  EXPECT_DOUBLE_EQ(r.value, 0.25 * 3);
}

TEST(SiMse, Errors) {
  EXPECT_THROW(si_mse(ImageF(2, 2), ImageF(2, 3)), ShapeError);
  EXPECT_THROW(si_mse(ImageF(2, 2), ImageF(2, 2), Mask(2, 2, false)),
               InputError);
  EXPECT_THROW(si_mse(ImageF(2, 2), ImageF(2, 2), Mask(3, 2)), ShapeError);
}

TEST(SiL2, ScaleInvariance) {
  std::mt19937_64 rng(53);
  const ShadingMap s{random_gray(8, 8, rng)};
  EXPECT_EQ(si_l2(s, s).value, 0.0);
  EXPECT_LE(si_l2(s, ShadingMap{3.0 * s.data}).value, 1e-7);
}

TEST(SiL2, HandExample) {
  GrayImage so(2, 2);
  GrayImage sa(2, 2);
  const double o[] = {0.8, 0.4, 0.2, 0.6};
  for (int i = 0; i < 4; ++i) {
    so.values()[i] = o[i];
    sa.values()[i] = o[i] / 2;
  }
  const ScaleInvariantResult r = si_l2(ShadingMap{so}, ShadingMap{sa});
  EXPECT_NEAR(r.alpha, 2.0, 1e-15);
  EXPECT_LE(r.value, 1e-7);
  // Grid check on the squared residual.
  double best = INFINITY;
  for (int k = 0; k <= 40000; ++k) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double d = so.values()[i] - k * 1e-4 * sa.values()[i];
      s += d * d;
    }
    best = std::min(best, s);
  }
  EXPECT_NEAR(r.value * r.value, best, 1e-6);
}

TEST(SiL2, NotNormalisedByPixelCount) {
  // Residual of a fixed per-pixel pattern grows with sqrt(N).
  GrayImage o1(2, 2);
  GrayImage a1(2, 2, 0.5);
  o1.values()[0] = 1.0;
  o1.values()[1] = 0.0;
  o1.values()[2] = 1.0;
  o1.values()[3] = 0.0;
  GrayImage o2(4, 4);
  GrayImage a2(4, 4, 0.5);
  for (int i = 0; i < 16; ++i) o2.values()[i] = i % 2 == 0 ? 1.0 : 0.0;
  const double v1 = si_l2(ShadingMap{o1}, ShadingMap{a1}).value;
  const double v2 = si_l2(ShadingMap{o2}, ShadingMap{a2}).value;
  EXPECT_NEAR(v2 / v1, 2.0, 1e-12);
}

LandmarkSet eyes_100_apart() {
  LandmarkSet l;
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(0.0, 300.0);
  for (auto& p : l.points) p = {u(rng), u(rng)};
  for (int i = 36; i <= 41; ++i) l.points[i] = {100, 150};
  for (int i = 42; i <= 47; ++i) l.points[i] = {200, 150};
  return l;
}

TEST(LandmarkError, IdenticalAndShifted) {
  const LandmarkSet o = eyes_100_apart();
  EXPECT_EQ(landmark_error(o, o), 0.0);
  LandmarkSet a = o;
  for (auto& p : a.points) p = {p.x + 3, p.y + 4};
  EXPECT_NEAR(landmark_error(o, a), 0.07, 1e-15);
  EXPECT_NEAR(expression_error(o, a), 0.07, 1e-15);
}

TEST(LandmarkError, JointScalingUnchanged) {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> g(0.0, 2.0);
  const LandmarkSet o = eyes_100_apart();
  LandmarkSet a = o;
  for (auto& p : a.points) p = {p.x + g(rng), p.y + g(rng)};
  LandmarkSet o2 = o;
  LandmarkSet a2 = a;
  for (auto& p : o2.points) p = {2 * p.x, 2 * p.y};
  for (auto& p : a2.points) p = {2 * p.x, 2 * p.y};
  EXPECT_NEAR(landmark_error(o2, a2), landmark_error(o, a), 1e-12);
}

TEST(LandmarkError, SubsetUsesParentIod) {
  const LandmarkSet o = eyes_100_apart();
  LandmarkSet a = o;
  a.points[0].x += 50;  // jaw only: invisible to the expression subset
  EXPECT_EQ(expression_error(o, a), 0.0);
  EXPECT_NEAR(landmark_error(o, a), 50.0 / 68 / 100, 1e-15);
  EXPECT_THROW(
      landmark_error(expression_subset(o), expression_subset(a), 0.0),
      InputError);
}

TEST(Cosine, Examples) {
  EXPECT_NEAR(cosine_similarity({{1, 2, 3}}, {{1, 2, 3}}), 1.0, 1e-15);
  EXPECT_EQ(cosine_similarity({{1, 0}}, {{0, 1}}), 0.0);
  EXPECT_NEAR(cosine_similarity({{1, 0}}, {{1, 1}}), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(cosine_similarity({{1, 0}}, {{-2, 0}}), -1.0, 1e-15);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine_similarity({{1, 0}}, {{1, 0, 0}}), ShapeError);
  EXPECT_THROW(cosine_similarity({{0, 0}}, {{1, 0}}), InputError);
  EXPECT_THROW(cosine_similarity({{}}, {{}}), ShapeError);
}

TEST(ReidRate, Examples) {
  const std::vector<double> s = {0.9, 0.1, 0.5, 0.7};
  EXPECT_DOUBLE_EQ(reid_rate(s, 0.6), 50.0);
  EXPECT_DOUBLE_EQ(reid_rate(s, 0.95), 0.0);
  EXPECT_DOUBLE_EQ(reid_rate(s, 0.9), 0.0);  // strictly above
  EXPECT_DOUBLE_EQ(reid_rate(s, 0.0), 100.0);
  EXPECT_THROW(reid_rate({}, 0.5), InputError);
}

FeatureMatrix column(std::initializer_list<double> v) {
  FeatureMatrix m(v.size(), 1);
  int i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

TEST(Fid, SameMatrixIsZero) {
  std::mt19937_64 rng(56);
  std::normal_distribution<double> g;
  for (auto [n, d] : {std::pair{50, 8}, {5, 12}}) {  // second is rank deficient
    FeatureMatrix a(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    EXPECT_LE(fid(a, a), 1e-6);
  }
}

TEST(Fid, OneDimensionalExactMoments) {
  const double h = 1.0 / std::sqrt(2.0);
  // Sample mean 0 and 1, unbiased variance 1 in both.
  EXPECT_NEAR(fid(column({-h, h}), column({1 - h, 1 + h})), 1.0, 1e-6);
  // (mu1 - mu2)^2 + (sigma1 - sigma2)^2 with sigma2 = 3.
  EXPECT_NEAR(fid(column({-h, h}), column({2 - 3 * h, 2 + 3 * h})),
              4.0 + 4.0, 1e-6);
}

TEST(Fid, DiagonalCovarianceIsSeparable) {
  // Hadamard design rows: columns zero-mean and mutually orthogonal, so the
  // sample covariance is exactly diagonal.
  const int signs[4][3] = {{1, 1, 1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, 1}};
  auto make = [&](std::array<double, 3> mu, std::array<double, 3> sd) {
    FeatureMatrix f(4, 3);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j)
        f(i, j) = mu[j] + sd[j] * std::sqrt(0.75) * signs[i][j];
    return f;
  };
  const std::array<double, 3> mu1 = {0.0, 1.0, -2.0};
  const std::array<double, 3> sd1 = {1.0, 2.0, 0.5};
  const std::array<double, 3> mu2 = {1.0, 1.5, -2.0};
  const std::array<double, 3> sd2 = {1.5, 1.0, 0.25};
  double expected = 0.0;
  for (int j = 0; j < 3; ++j) {
    expected += (mu1[j] - mu2[j]) * (mu1[j] - mu2[j]) +
                (sd1[j] - sd2[j]) * (sd1[j] - sd2[j]);
  }
  EXPECT_NEAR(fid(make(mu1, sd1), make(mu2, sd2)), expected, 1e-6);
}

TEST(Fid, SymmetricNonNegativeTranslationInvariant) {
  std::mt19937_64 rng(57);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    FeatureMatrix a(30, 5);
    FeatureMatrix b(40, 5);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (int i = 0; i < b.size(); ++i) b.data()[i] = 2.0 * g(rng) + 0.3;
    const double ab = fid(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, fid(b, a), 1e-9 * std::max(1.0, ab));
    Eigen::RowVectorXd shift = Eigen::RowVectorXd::Constant(5, 7.5);
    FeatureMatrix as = a.rowwise() + shift;
    FeatureMatrix bs = b.rowwise() + shift;
    EXPECT_NEAR(fid(as, bs), ab, 1e-8 * std::max(1.0, ab));
  }
}

TEST(Fid, Errors) {
  EXPECT_THROW(fid(FeatureMatrix(3, 2), FeatureMatrix(3, 3)), ShapeError);
  EXPECT_THROW(fid(FeatureMatrix(1, 2), FeatureMatrix(3, 2)), InputError);
}

TEST(DetectionRate, Examples) {
  std::vector<DetectionRecord> r = {
      {"a", true}, {"b", true}, {"c", false}, {"d", true}};
  EXPECT_DOUBLE_EQ(detection_rate(r), 75.0);
  for (auto& x : r) x.detected = true;
  EXPECT_DOUBLE_EQ(detection_rate(r), 100.0);
  for (auto& x : r) x.detected = false;
  EXPECT_DOUBLE_EQ(detection_rate(r), 0.0);
  EXPECT_THROW(detection_rate({}), InputError);
}

TEST(EmotionAgreement, Examples) {
  std::vector<EmotionPair> p = {
      {"happy", "happy"}, {"sad", "sad"}, {"anger", "anger"}, {"fear", "fear"}};
  EXPECT_DOUBLE_EQ(emotion_agreement(p), 100.0);
  p[2].label_a = "neutral";
  EXPECT_DOUBLE_EQ(emotion_agreement(p), 75.0);
  for (auto& x : p) x.label_a = "x_" + x.label_o;
  EXPECT_DOUBLE_EQ(emotion_agreement(p), 0.0);
  EXPECT_THROW(emotion_agreement({}), InputError);
}

TEST(ColorMetrics, IdenticalImagesAllZero) {
  std::mt19937_64 rng(58);
  const ImageF img = random_image(8, 8, rng);
  const ColorMetrics m = color_metrics(img, img);
  EXPECT_EQ(m.mean_delta_L, 0.0);
  EXPECT_EQ(m.mean_delta_C, 0.0);
  EXPECT_EQ(m.mean_delta_E2000, 0.0);
  EXPECT_EQ(m.mse_L, 0.0);
  EXPECT_EQ(m.mse_ab, 0.0);
}

TEST(ColorMetrics, LightnessShift) {
  std::mt19937_64 rng(59);
  const auto lab_o = rgb_to_lab(random_image(6, 6, rng, 0.1, 0.6));
  auto lab_a = lab_o;
  for (auto& c : lab_a) c.L += 10;
  const ColorMetrics m = color_metrics(lab_o, lab_a);
  EXPECT_NEAR(m.mean_delta_L, 10.0, 1e-12);
  EXPECT_NEAR(m.mean_delta_C, 0.0, 1e-12);
  EXPECT_NEAR(m.mse_L, 0.01, 1e-12);
  EXPECT_NEAR(m.mse_ab, 0.0, 1e-20);
}

TEST(ColorMetrics, MatchesPerPixelLoop) {
  std::mt19937_64 rng(60);
  const ImageF o = random_image(9, 7, rng);
  const ImageF a = random_image(9, 7, rng);
  Mask mask(9, 7, true);
  for (int i = 0; i < 63; i += 3) mask.selected[i] = 0;
  const ColorMetrics m = color_metrics(o, a, mask);
  double de = 0.0;
  double n = 0.0;
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 7; ++x) {
      if (!mask[y * 7 + x]) continue;
      de += delta_E2000(rgb_to_lab(o(y, x, 0), o(y, x, 1), o(y, x, 2)),
                        rgb_to_lab(a(y, x, 0), a(y, x, 1), a(y, x, 2)));
      n += 1;
    }
  EXPECT_NEAR(m.mean_delta_E2000, de / n, 1e-9);
}

TEST(ColorMetrics, Errors) {
  EXPECT_THROW(color_metrics(ImageF(2, 2), ImageF(2, 3)), ShapeError);
  EXPECT_THROW(color_metrics(ImageF(2, 2), ImageF(2, 2), Mask(2, 2, false)),
               InputError);
}

TEST(Aggregate, MeanAndPopulationStd) {
  const std::vector<double> v = {1, 2, 3, 4};
  const Aggregate a = aggregate(v);
  EXPECT_DOUBLE_EQ(a.mean, 2.5);
  EXPECT_DOUBLE_EQ(a.std, std::sqrt(1.25));
  EXPECT_EQ(a.count, 4u);
  EXPECT_EQ(aggregate({}).count, 0u);
}

}  // namespace
}  // namespace anonfix
