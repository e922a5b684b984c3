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

// Deterministic synthetic data: face-like image pairs with known albedo and
// shading, landmark files, embeddings, feature matrices, detection records
// and emotion labels. Everything the acceptance suite needs without an
// external dataset.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "anonfix/errors.hpp"
#include "anonfix/formats.hpp"
#include "anonfix/image.hpp"
#include "anonfix/landmarks.hpp"
#include "anonfix/metrics.hpp"
#include "anonfix/png_io.hpp"
#include "anonfix/text.hpp"

namespace anonfix::app {

struct SyntheticPair {
  ImageF original;    // albedo_o * shading_o
  ImageF anonymized;  // albedo_a * shading_a
  ImageF albedo_o;
  ImageF albedo_a;
  GrayImage shading_o;  // directional gradient
  GrayImage shading_a;  // flat
};

struct AlbedoStyle {
  std::array<double, 3> tint;
  double blob_amplitude;
  double stripe_amplitude;
};

namespace detail {

inline ImageF textured_albedo(int h, int w, const AlbedoStyle& style,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Blob {
    double cy, cx, radius, weight;
  };
  std::vector<Blob> blobs(6);
  for (auto& b : blobs) {
    b = {unit(rng) * h, unit(rng) * w, (0.04 + 0.08 * unit(rng)) * w,
         unit(rng) < 0.5 ? -1.0 : 1.0};
  }
  const double freq_x = 2.0 * std::numbers::pi * (0.18 + 0.1 * unit(rng));
  const double freq_y = 2.0 * std::numbers::pi * (0.13 + 0.1 * unit(rng));
  const double phase = 2.0 * std::numbers::pi * unit(rng);

  ImageF a(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double blob = 0.0;
      for (const auto& b : blobs) {
        const double d2 = (y - b.cy) * (y - b.cy) + (x - b.cx) * (x - b.cx);
        blob += b.weight * std::exp(-d2 / (2.0 * b.radius * b.radius));
      }
      const double stripes =
          std::sin(freq_x * x + phase) * std::sin(freq_y * y);
      const double m = 1.0 + style.blob_amplitude * blob +
                       style.stripe_amplitude * stripes;
      for (int c = 0; c < 3; ++c) {
        a(y, x, c) = std::clamp(style.tint[c] * m, 0.0, 1.0);
      }
    }
  }
  return a;
}

inline ImageF multiply(const ImageF& albedo, const GrayImage& shading) {
  ImageF out(albedo.height(), albedo.width());
  for (int y = 0; y < albedo.height(); ++y) {
    for (int x = 0; x < albedo.width(); ++x) {
      for (int c = 0; c < 3; ++c) out(y, x, c) = albedo(y, x, c) * shading(y, x);
    }
  }
  return out;
}

}  // namespace detail

/// Gradient shading from a light placed at `angle` (radians) in the image
/// plane, spanning [lo, hi].
inline GrayImage gradient_shading(int h, int w, double angle, double lo = 0.2,
                                  double hi = 0.95) {
  GrayImage s(h, w);
  const double ux = std::cos(angle);
  const double uy = std::sin(angle);
  const double span = std::abs(ux) * (w - 1) + std::abs(uy) * (h - 1);
  double min_proj = 0.0;
  if (ux < 0) min_proj += ux * (w - 1);
  if (uy < 0) min_proj += uy * (h - 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = span > 0 ? (ux * x + uy * y - min_proj) / span : 0.5;
      s(y, x) = lo + (hi - lo) * t;
    }
  }
  return s;
}

/**
 * @brief I_o = A * S_grad and I_a = A' * S_flat, where A' has a different
 * texture and a paler, cooler tint than A.
 */
inline SyntheticPair make_relight_pair(int size, std::uint64_t seed,
                                       double light_angle = 0.0) {
  std::mt19937_64 rng(seed);
  SyntheticPair p;
  p.albedo_o = detail::textured_albedo(size, size, {{0.92, 0.68, 0.55}, 0.12, 0.06}, rng);
  p.albedo_a = detail::textured_albedo(size, size, {{0.80, 0.70, 0.68}, 0.10, 0.08}, rng);
  p.shading_o = gradient_shading(size, size, light_angle);
  p.shading_a = GrayImage(size, size, 0.65);
  p.original = detail::multiply(p.albedo_o, p.shading_o);
  p.anonymized = detail::multiply(p.albedo_a, p.shading_a);
  return p;
}

/// A plausible iBUG-68 layout for a face centred in a size x size frame.
inline LandmarkSet canonical_landmarks(double size) {
  LandmarkSet l;
  const double cx = 0.5 * size;
  const double cy = 0.5 * size;
  const double s = size;
  auto at = [&](int i, double x, double y) { l.points[i] = {cx + x * s, cy + y * s}; };
  for (int i = 0; i <= 16; ++i) {  // jaw
    const double t = std::numbers::pi * i / 16.0;
    at(i, -0.36 * std::cos(t), 0.38 * std::sin(t));
  }
  for (int i = 0; i < 5; ++i) {  // brows
    const double t = i / 4.0;
    at(17 + i, -0.30 + 0.2 * t, -0.20 - 0.04 * std::sin(std::numbers::pi * t));
    at(22 + i, 0.10 + 0.2 * t, -0.20 - 0.04 * std::sin(std::numbers::pi * t));
  }
  for (int i = 0; i < 4; ++i) at(27 + i, 0.0, -0.12 + 0.05 * i);  // nose bridge
  for (int i = 0; i < 5; ++i) at(31 + i, -0.08 + 0.04 * i, 0.1);  // nostrils
  for (int e = 0; e < 2; ++e) {  // eyes
    const double ex = e == 0 ? -0.17 : 0.17;
    for (int i = 0; i < 6; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 6.0;
      at(36 + 6 * e + i, ex - 0.06 * std::cos(t), -0.1 - 0.025 * std::sin(t));
    }
  }
  for (int i = 0; i < 12; ++i) {  // outer lip
    const double t = 2.0 * std::numbers::pi * i / 12.0;
    at(48 + i, -0.14 * std::cos(t), 0.22 - 0.06 * std::sin(t));
  }
  for (int i = 0; i < 8; ++i) {  // inner lip
    const double t = 2.0 * std::numbers::pi * i / 8.0;
    at(60 + i, -0.09 * std::cos(t), 0.22 - 0.025 * std::sin(t));
  }
  return l;
}

inline Mask ellipse_mask(int h, int w) {
  Mask m(h, w, false);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dy = (y - 0.5 * (h - 1)) / (0.45 * h);
      const double dx = (x - 0.5 * (w - 1)) / (0.38 * w);
      m.selected[static_cast<std::size_t>(y) * w + x] =
          dx * dx + dy * dy <= 1.0 ? 1 : 0;
    }
  }
  return m;
}

/**
 * @brief Features whose columns are exactly uncorrelated: rows follow a
 * 4x4 Hadamard design (zero-mean, mutually orthogonal columns), column j
 * scaled to sample standard deviation sigma[j] and shifted to mean mu[j].
 */
inline FeatureMatrix diagonal_features(const std::array<double, 3>& mu,
                                       const std::array<double, 3>& sigma) {
  // Columns 2..4 of the Sylvester Hadamard matrix of order 4.
  constexpr int kSigns[4][3] = {
      {1, 1, 1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, 1}};
  // Each column has sum of squares 4, so unit sample variance needs
  // scale sqrt(3/4).
  const double unit = std::sqrt(3.0 / 4.0);
  FeatureMatrix f(4, 3);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      f(i, j) = mu[j] + sigma[j] * unit * kSigns[i][j];
    }
  }
  return f;
}

struct FixtureOptions {
  int pairs = 10;
  int size = 96;
  int relight_size = 128;
  std::uint64_t seed = 20240917;
  /// Also write a 1024x1024 pair for the timing baseline.
  bool with_perf_pair = false;
};

/**
 * @brief Writes the fixture tree:
 *
 *   manifest.csv, identity_manifest.csv   evaluation manifests
 *   pairs/...                             images, masks, landmarks, embeddings
 *   relight/original.png, anonymized.png  end-to-end relighting pair
 *   features_real.csv, features_fake.csv  analytic FID inputs
 *   detections.csv, labels_o.csv, labels_a.csv
 */
inline void write_fixtures(const std::filesystem::path& dir,
                           const FixtureOptions& opts = {}) {
  namespace fs = std::filesystem;
  if (opts.pairs < 1 || opts.size < 16) {
    throw InputError("fixtures: need >= 1 pair and size >= 16");
  }
  fs::create_directories(dir / "pairs");
  fs::create_directories(dir / "relight");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::array<const char*, 4> emotions = {"neutral", "happy", "sad",
                                               "surprise"};

  std::ofstream manifest(dir / "manifest.csv");
  std::ofstream identity(dir / "identity_manifest.csv");
  std::ofstream labels_o(dir / "labels_o.csv");
  std::ofstream labels_a(dir / "labels_a.csv");
  std::ofstream detections(dir / "detections.csv");
  if (!manifest || !identity || !labels_o || !labels_a || !detections) {
    throw InputError("fixtures: cannot write into '" + dir.string() + "'");
  }
  const char* header =
      "pair_id,original,anonymized,mask,landmarks_o,landmarks_a,emb_o,emb_a,"
      "label_o,label_a\n";
  manifest << header;
  identity << header;
  labels_o << "image_id,label\n";
  labels_a << "image_id,label\n";
  detections << "image_id,detected\n";

  const Mask mask = ellipse_mask(opts.size, opts.size);
  const LandmarkSet base = canonical_landmarks(opts.size);

  for (int i = 0; i < opts.pairs; ++i) {
    char id_buf[16];
    std::snprintf(id_buf, sizeof(id_buf), "p%02d", i);
    const std::string id = id_buf;
    const std::string stem = "pairs/" + id;

    const double angle = 2.0 * std::numbers::pi * i / opts.pairs;
    const SyntheticPair pair = make_relight_pair(opts.size, opts.seed + i, angle);
    save_image(pair.original, dir / (stem + "_orig.png"));
    save_image(pair.anonymized, dir / (stem + "_anon.png"));
    save_mask(mask, dir / (stem + "_mask.png"));

    LandmarkSet lo = base;
    LandmarkSet la = base;
    for (auto& p : la.points) {
      p.x += 0.3 * i + 0.5 * gauss(rng);
      p.y += 0.2 * i + 0.5 * gauss(rng);
    }
    write_landmarks(dir / (stem + "_orig.landmarks.csv"), lo);
    write_landmarks(dir / (stem + "_anon.landmarks.csv"), la);

    EmbeddingVector eo;
    EmbeddingVector ea;
    for (int d = 0; d < 16; ++d) {
      const double v = gauss(rng);
      eo.values.push_back(v);
      ea.values.push_back(0.4 * v + gauss(rng));
    }
    write_embedding(dir / (stem + "_emb_o.txt"), eo);
    write_embedding(dir / (stem + "_emb_a.txt"), ea);

    const std::string lab_o = emotions[i % emotions.size()];
    const std::string lab_a = (i % 4 == 3) ? emotions[(i + 1) % emotions.size()]
                                           : lab_o;
    labels_o << id << ',' << lab_o << '\n';
    labels_a << id << ',' << lab_a << '\n';
    detections << id << ',' << (i == opts.pairs - 1 ? 0 : 1) << '\n';

    manifest << id << ',' << stem << "_orig.png," << stem << "_anon.png,"
             << stem << "_mask.png," << stem << "_orig.landmarks.csv,"
             << stem << "_anon.landmarks.csv," << stem << "_emb_o.txt,"
             << stem << "_emb_a.txt," << lab_o << ',' << lab_a << '\n';
    identity << id << ',' << stem << "_orig.png," << stem << "_orig.png,"
             << stem << "_mask.png," << stem << "_orig.landmarks.csv,"
             << stem << "_orig.landmarks.csv," << stem << "_emb_o.txt,"
             << stem << "_emb_o.txt," << lab_o << ',' << lab_o << '\n';
  }

  const SyntheticPair relight = make_relight_pair(opts.relight_size, opts.seed);
  save_image(relight.original, dir / "relight/original.png");
  save_image(relight.anonymized, dir / "relight/anonymized.png");
  save_gray(relight.shading_o, dir / "relight/shading_original.png");
  save_gray(relight.shading_a, dir / "relight/shading_anonymized.png");

  if (opts.with_perf_pair) {
    const SyntheticPair perf = make_relight_pair(1024, opts.seed + 1000, 0.7);
    save_image(perf.original, dir / "relight/original_1024.png");
    save_image(perf.anonymized, dir / "relight/anonymized_1024.png");
  }

  write_feature_matrix(dir / "features_real.csv",
                       diagonal_features({0.0, 1.0, -2.0}, {1.0, 2.0, 0.5}));
  write_feature_matrix(dir / "features_fake.csv",
                       diagonal_features({1.0, 1.5, -2.0}, {1.5, 1.0, 0.5}));
}

}  // namespace anonfix::app
