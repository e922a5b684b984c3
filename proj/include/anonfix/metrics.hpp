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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonfix/colorspace.hpp"
#include "anonfix/errors.hpp"
#include "anonfix/image.hpp"
#include "anonfix/intrinsic.hpp"
#include "anonfix/landmarks.hpp"

namespace anonfix {

// ---------------------------------------------------------------------------
// Lighting

struct ScaleInvariantResult {
  double value = 0.0;
  double alpha = 0.0;
  /// The test signal was all zero on the selection, alpha fixed to 0.
  bool degenerate = false;
};

namespace detail {

// Closed-form minimiser of ||ref - alpha * test||^2 over the selection.
// Returns the residual energy; channels are pooled.
template <int C>
ScaleInvariantResult scale_invariant_residual(const Image<C>& ref,
                                              const Image<C>& test,
                                              const std::optional<Mask>& mask,
                                              const char* what) {
  require_same_shape(ref, test, what);
  require_mask_shape(ref, mask, what);
  if (selected_count(ref, mask) == 0) {
    throw InputError(std::string(what) + ": mask selects no pixels");
  }
  auto o = ref.values();
  auto a = test.values();
  const std::size_t n = ref.pixel_count();
  double oa = 0.0;
  double aa = 0.0;
  double oo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask && !(*mask)[i]) continue;
    for (int c = 0; c < C; ++c) {
      const double ov = o[i * C + c];
      const double av = a[i * C + c];
      oa += ov * av;
      aa += av * av;
      oo += ov * ov;
    }
  }
  ScaleInvariantResult res;
  if (aa == 0.0) {
    res.degenerate = true;
    res.alpha = 0.0;
    res.value = oo;
    return res;
  }
  res.alpha = oa / aa;
  // Residual summed directly rather than via oo - oa^2/aa, which cancels
  // catastrophically when the fit is nearly exact.
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask && !(*mask)[i]) continue;
    for (int c = 0; c < C; ++c) {
      const double d = o[i * C + c] - res.alpha * a[i * C + c];
      sse += d * d;
    }
  }
  res.value = sse;
  return res;
}

}  // namespace detail

/// min_alpha ||I_o - alpha I_a||^2 / N, N = number of selected pixels.
inline ScaleInvariantResult si_mse(const ImageF& ref, const ImageF& test,
                                   const std::optional<Mask>& mask = {}) {
  ScaleInvariantResult r =
      detail::scale_invariant_residual(ref, test, mask, "si_mse");
  r.value /= static_cast<double>(selected_count(ref, mask));
  return r;
}

/// min_alpha sqrt(||S_o - alpha S_a||^2), no per-pixel normalisation.
inline ScaleInvariantResult si_l2(const ShadingMap& ref,
                                  const ShadingMap& test,
                                  const std::optional<Mask>& mask = {}) {
  ScaleInvariantResult r =
      detail::scale_invariant_residual(ref.data, test.data, mask, "si_l2");
  r.value = std::sqrt(r.value);
  return r;
}

// ---------------------------------------------------------------------------
// Geometry

namespace detail {

template <std::size_t N>
double normalized_l1(const std::array<Point2, N>& o,
                     const std::array<Point2, N>& a, double iod) {
  if (!(iod >= 1e-9)) {
    throw InputError("landmark_error: inter-ocular distance must be > 0");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    sum += std::abs(o[k].x - a[k].x) + std::abs(o[k].y - a[k].y);
  }
  return sum / static_cast<double>(N) / iod;
}

}  // namespace detail

/// Mean per-point L1 displacement over all 68 points, divided by the
/// inter-ocular distance of the original set.
inline double landmark_error(const LandmarkSet& original,
                             const LandmarkSet& anonymized) {
  return detail::normalized_l1(original.points, anonymized.points,
                               interocular_distance(original));
}

/// Same measure over the 51 expression points; `iod` is taken from the
/// parent 68-point set of the original.
inline double landmark_error(const ExpressionSubset& original,
                             const ExpressionSubset& anonymized, double iod) {
  return detail::normalized_l1(original.points, anonymized.points, iod);
}

inline double expression_error(const LandmarkSet& original,
                               const LandmarkSet& anonymized) {
  return landmark_error(expression_subset(original),
                        expression_subset(anonymized),
                        interocular_distance(original));
}

// ---------------------------------------------------------------------------
// Privacy

struct EmbeddingVector {
  std::vector<double> values;
};

inline double cosine_similarity(const EmbeddingVector& e1,
                                const EmbeddingVector& e2) {
  if (e1.values.size() != e2.values.size() || e1.values.empty()) {
    throw ShapeError("cosine_similarity: embedding dimension mismatch (" +
                     std::to_string(e1.values.size()) + " vs " +
                     std::to_string(e2.values.size()) + ")");
  }
  double dot = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < e1.values.size(); ++i) {
    dot += e1.values[i] * e2.values[i];
    n1 += e1.values[i] * e1.values[i];
    n2 += e2.values[i] * e2.values[i];
  }
  n1 = std::sqrt(n1);
  n2 = std::sqrt(n2);
  if (n1 <= 1e-12 || n2 <= 1e-12) {
    throw InputError("cosine_similarity: zero-norm embedding");
  }
  return std::clamp(dot / (n1 * n2), -1.0, 1.0);
}

/// Percentage of similarities strictly above the threshold.
inline double reid_rate(std::span<const double> similarities,
                        double threshold) {
  if (similarities.empty()) throw InputError("reid_rate: no similarities");
  const auto hits = std::count_if(similarities.begin(), similarities.end(),
                                  [&](double s) { return s > threshold; });
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(similarities.size());
}

// ---------------------------------------------------------------------------
// Realism

/// N samples (rows) by D feature dimensions (columns).
using FeatureMatrix = Eigen::MatrixXd;

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Sample mean and unbiased (ddof = 1) covariance.
inline GaussianSummary fit_gaussian(const FeatureMatrix& features) {
  if (features.rows() < 2) {
    throw InputError("fid: need at least 2 samples, got " +
                     std::to_string(features.rows()));
  }
  GaussianSummary g;
  g.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - g.mean.transpose();
  g.cov = (centered.transpose() * centered) /
          static_cast<double>(features.rows() - 1);
  g.cov = 0.5 * (g.cov + g.cov.transpose());
  return g;
}

namespace detail {

// Symmetric PSD square root via eigendecomposition, eigenvalues floored at 0.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace detail

/**
 * @brief Frechet distance between two Gaussians:
 * |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}).
 *
 * The trace of (S1 S2)^{1/2} is computed from the symmetric product
 * S1^{1/2} S2 S1^{1/2}, which has the same eigenvalues.
 */
inline double frechet_distance(const GaussianSummary& g1,
                               const GaussianSummary& g2) {
  if (g1.mean.size() != g2.mean.size()) {
    throw ShapeError("fid: feature dimension mismatch (" +
                     std::to_string(g1.mean.size()) + " vs " +
                     std::to_string(g2.mean.size()) + ")");
  }
  const Eigen::MatrixXd s1h = detail::psd_sqrt(g1.cov);
  Eigen::MatrixXd inner = s1h * g2.cov * s1h;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner,
                                                    Eigen::EigenvaluesOnly);
  const double tr_covmean = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double mean_term = (g1.mean - g2.mean).squaredNorm();
  const double d =
      mean_term + g1.cov.trace() + g2.cov.trace() - 2.0 * tr_covmean;
  return std::max(0.0, d);
}

inline double fid(const FeatureMatrix& real, const FeatureMatrix& fake) {
  if (real.cols() != fake.cols()) {
    throw ShapeError("fid: feature dimension mismatch (" +
                     std::to_string(real.cols()) + " vs " +
                     std::to_string(fake.cols()) + ")");
  }
  return frechet_distance(fit_gaussian(real), fit_gaussian(fake));
}

// ---------------------------------------------------------------------------
// Categorical agreement

struct DetectionRecord {
  std::string image_id;
  bool detected = false;
};

inline double detection_rate(std::span<const DetectionRecord> records) {
  if (records.empty()) throw InputError("detection_rate: no records");
  const auto hits = std::count_if(records.begin(), records.end(),
                                  [](const auto& r) { return r.detected; });
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(records.size());
}

struct EmotionPair {
  std::string label_o;
  std::string label_a;
};

inline double emotion_agreement(std::span<const EmotionPair> pairs) {
  if (pairs.empty()) throw InputError("emotion_agreement: no label pairs");
  const auto hits = std::count_if(pairs.begin(), pairs.end(), [](const auto& p) {
    return p.label_o == p.label_a;
  });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pairs.size());
}

// ---------------------------------------------------------------------------
// Colour

struct ColorMetrics {
  double mean_delta_L = 0.0;
  double mean_delta_C = 0.0;
  double mean_delta_E2000 = 0.0;
  double mse_L = 0.0;   // on L / 100
  double mse_ab = 0.0;  // on (a, b) / 128
};

inline ColorMetrics color_metrics(std::span<const ColorLab> lab_o,
                                  std::span<const ColorLab> lab_a,
                                  const std::optional<Mask>& mask = {}) {
  if (lab_o.size() != lab_a.size()) {
    throw ShapeError("color_metrics: dimension mismatch");
  }
  if (mask && mask->selected.size() != lab_o.size()) {
    throw ShapeError("color_metrics: mask dimension mismatch");
  }
  ColorMetrics m;
  std::size_t n = 0;
  for (std::size_t i = 0; i < lab_o.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    const ColorLab& o = lab_o[i];
    const ColorLab& a = lab_a[i];
    m.mean_delta_L += delta_L(o, a);
    m.mean_delta_C += delta_C(o, a);
    m.mean_delta_E2000 += delta_E2000(o, a);
    const double dl = (o.L - a.L) / 100.0;
    const double da = (o.a - a.a) / 128.0;
    const double db = (o.b - a.b) / 128.0;
    m.mse_L += dl * dl;
    m.mse_ab += da * da + db * db;
    ++n;
  }
  if (n == 0) throw InputError("color_metrics: mask selects no pixels");
  const double inv = 1.0 / static_cast<double>(n);
  m.mean_delta_L *= inv;
  m.mean_delta_C *= inv;
  m.mean_delta_E2000 *= inv;
  m.mse_L *= inv;
  m.mse_ab *= inv;
  return m;
}

inline ColorMetrics color_metrics(const ImageF& img_o, const ImageF& img_a,
                                  const std::optional<Mask>& mask = {}) {
  require_same_shape(img_o, img_a, "color_metrics");
  require_mask_shape(img_o, mask, "color_metrics");
  return color_metrics(rgb_to_lab(img_o), rgb_to_lab(img_a), mask);
}

// ---------------------------------------------------------------------------
// Aggregation

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

/// Mean and population standard deviation, summed in the given order.
inline Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.std = std::sqrt(ss / static_cast<double>(values.size()));
  return a;
}

}  // namespace anonfix
