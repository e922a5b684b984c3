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
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "anonfix/app/manifest.hpp"
#include "anonfix/colorspace.hpp"
#include "anonfix/errors.hpp"
#include "anonfix/formats.hpp"
#include "anonfix/intrinsic.hpp"
#include "anonfix/landmarks.hpp"
#include "anonfix/metrics.hpp"
#include "anonfix/pipeline.hpp"
#include "anonfix/png_io.hpp"
#include "anonfix/version.hpp"

namespace anonfix::app {

/// Raised when no manifest pair yields a single metric value.
class NothingEvaluableError : public std::runtime_error {
 public:
  explicit NothingEvaluableError(const std::string& what)
      : std::runtime_error(what) {}
};

namespace metric {
inline constexpr const char* kSiMse = "si_mse";
inline constexpr const char* kSiL2 = "si_l2";
inline constexpr const char* kDeltaL = "delta_L";
inline constexpr const char* kDeltaC = "delta_C";
inline constexpr const char* kDeltaE2000 = "delta_E2000";
inline constexpr const char* kMseL = "mse_L";
inline constexpr const char* kMseAb = "mse_ab";
inline constexpr const char* kPoseError = "pose_error";
inline constexpr const char* kExpressionError = "expression_error";
inline constexpr const char* kCosineSimilarity = "cosine_similarity";
// Dataset-level.
inline constexpr const char* kFid = "fid";
inline constexpr const char* kDetectionRate = "detection_rate";
inline constexpr const char* kEmotionAgreement = "emotion_agreement";
inline constexpr const char* kReidRate = "reid_rate";
}  // namespace metric

inline const std::vector<std::string>& pair_metric_names() {
  static const std::vector<std::string> names = {
      metric::kSiMse,       metric::kSiL2,        metric::kDeltaL,
      metric::kDeltaC,      metric::kDeltaE2000,  metric::kMseL,
      metric::kMseAb,       metric::kPoseError,   metric::kExpressionError,
      metric::kCosineSimilarity};
  return names;
}

inline const std::vector<std::string>& dataset_metric_names() {
  static const std::vector<std::string> names = {
      metric::kFid, metric::kDetectionRate, metric::kEmotionAgreement,
      metric::kReidRate};
  return names;
}

inline std::vector<std::string> all_metric_names() {
  std::vector<std::string> all = pair_metric_names();
  const auto& ds = dataset_metric_names();
  all.insert(all.end(), ds.begin(), ds.end());
  return all;
}

/// Everything that shapes a run. Worker count affects scheduling only and
/// is not echoed into reports.
struct RunConfig {
  std::string run_name = "anonfix";
  PipelineConfig pipeline;
  std::vector<std::string> metrics = all_metric_names();
  double reid_threshold = 0.5;
  int workers = 1;
  /// Colour metrics on decomposition albedo instead of raw images.
  bool color_on_albedo = false;
  std::optional<std::filesystem::path> features_real;
  std::optional<std::filesystem::path> features_fake;
  std::optional<std::filesystem::path> detections;
  std::optional<std::filesystem::path> labels_o;
  std::optional<std::filesystem::path> labels_a;

  bool wants(const std::string& m) const {
    return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
  }

  void validate() const {
    const auto all = all_metric_names();
    for (const auto& m : metrics) {
      if (std::find(all.begin(), all.end(), m) == all.end()) {
        throw InputError("unknown metric '" + m + "'");
      }
    }
    if (pipeline.pyramid && pipeline.blend.levels < 1) {
      throw InputError("pyramid levels must be >= 1");
    }
    if (workers < 1) throw InputError("workers must be >= 1");
  }
};

struct PairResult {
  std::string pair_id;
  std::map<std::string, double> values;
  std::map<std::string, std::string> skipped;
  std::vector<std::string> flags;
  std::optional<std::string> label_o;
  std::optional<std::string> label_a;
};

namespace detail {

inline std::optional<std::filesystem::path> existing(
    const std::optional<std::filesystem::path>& explicit_path,
    const std::filesystem::path& sidecar) {
  if (explicit_path) return explicit_path;
  std::error_code ec;
  if (std::filesystem::exists(sidecar, ec)) return sidecar;
  return std::nullopt;
}

template <typename Fn>
void guarded(PairResult& r, std::initializer_list<const char*> names,
             const RunConfig& cfg, Fn&& fn) {
  bool any = false;
  for (const char* n : names) any = any || cfg.wants(n);
  if (!any) return;
  auto skip_all = [&](const std::string& why) {
    for (const char* n : names) {
      if (cfg.wants(n)) r.skipped[n] = why;
    }
  };
  try {
    fn();
  } catch (const InputError& e) {
    skip_all(e.what());
  } catch (const ShapeError& e) {
    skip_all(e.what());
  }
}

}  // namespace detail

/// Computes every requested per-pair metric. Missing or unusable inputs are
/// recorded under `skipped` rather than aborting the run.
inline PairResult evaluate_pair(
    const PairEntry& e, const RunConfig& cfg,
    const std::map<std::string, std::string>& labels_o = {},
    const std::map<std::string, std::string>& labels_a = {}) {
  PairResult r;
  r.pair_id = e.pair_id;

  std::optional<ImageF> img_o;
  std::optional<ImageF> img_a;
  std::optional<Mask> mask;
  std::string image_problem;
  try {
    img_o = load_image(e.original);
    img_a = load_image(e.anonymized);
    require_same_shape(*img_o, *img_a, "pair images");
    if (e.mask) {
      mask = load_mask(*e.mask);
      require_mask_shape(*img_o, mask, "pair mask");
    }
  } catch (const std::runtime_error& ex) {
    image_problem = ex.what();
    img_o.reset();
    img_a.reset();
  }
  auto need_images = [&] {
    if (!img_o) throw InputError("images unavailable: " + image_problem);
  };

  std::optional<Decomposition> dec_o;
  std::optional<Decomposition> dec_a;
  auto decompositions = [&] {
    need_images();
    if (!dec_o) {
      dec_o = decompose(*img_o, cfg.pipeline.bilateral);
      dec_a = decompose(*img_a, cfg.pipeline.bilateral);
    }
  };

  detail::guarded(r, {metric::kSiMse}, cfg, [&] {
    need_images();
    const ScaleInvariantResult s = si_mse(*img_o, *img_a, mask);
    r.values[metric::kSiMse] = s.value;
    if (s.degenerate) r.flags.push_back("si_mse_zero_test_alpha0");
  });

  detail::guarded(r, {metric::kSiL2}, cfg, [&] {
    ShadingMap s_o;
    ShadingMap s_a;
    if (e.shading_o && e.shading_a) {
      s_o = shading_from_gray(load_gray(*e.shading_o));
      s_a = shading_from_gray(load_gray(*e.shading_a));
    } else {
      decompositions();
      s_o = dec_o->shading;
      s_a = dec_a->shading;
    }
    std::optional<Mask> m = mask;
    if (m && (m->height != s_o.height() || m->width != s_o.width())) {
      throw ShapeError("mask does not match shading dimensions");
    }
    const ScaleInvariantResult s = si_l2(s_o, s_a, m);
    r.values[metric::kSiL2] = s.value;
    if (s.degenerate) r.flags.push_back("si_l2_zero_test_alpha0");
  });

  detail::guarded(
      r,
      {metric::kDeltaL, metric::kDeltaC, metric::kDeltaE2000, metric::kMseL,
       metric::kMseAb},
      cfg, [&] {
        ColorMetrics cm;
        if (cfg.color_on_albedo) {
          decompositions();
          cm = color_metrics(clamp01(dec_o->albedo.data),
                             clamp01(dec_a->albedo.data), mask);
        } else {
          need_images();
          cm = color_metrics(*img_o, *img_a, mask);
        }
        auto put = [&](const char* n, double v) {
          if (cfg.wants(n)) r.values[n] = v;
        };
        put(metric::kDeltaL, cm.mean_delta_L);
        put(metric::kDeltaC, cm.mean_delta_C);
        put(metric::kDeltaE2000, cm.mean_delta_E2000);
        put(metric::kMseL, cm.mse_L);
        put(metric::kMseAb, cm.mse_ab);
      });

  detail::guarded(r, {metric::kPoseError, metric::kExpressionError}, cfg, [&] {
    const auto lo = detail::existing(e.landmarks_o, landmark_sidecar(e.original));
    const auto la =
        detail::existing(e.landmarks_a, landmark_sidecar(e.anonymized));
    if (!lo || !la) throw InputError("landmark files missing");
    const LandmarkSet o = parse_landmarks(*lo);
    const LandmarkSet a = parse_landmarks(*la);
    if (cfg.wants(metric::kPoseError)) {
      r.values[metric::kPoseError] = landmark_error(o, a);
    }
    if (cfg.wants(metric::kExpressionError)) {
      r.values[metric::kExpressionError] = expression_error(o, a);
    }
  });

  detail::guarded(r, {metric::kCosineSimilarity}, cfg, [&] {
    if (!e.emb_o || !e.emb_a) throw InputError("embedding files missing");
    r.values[metric::kCosineSimilarity] =
        cosine_similarity(parse_embedding(*e.emb_o), parse_embedding(*e.emb_a));
  });

  r.label_o = e.label_o;
  r.label_a = e.label_a;
  if (!r.label_o) {
    if (auto it = labels_o.find(e.pair_id); it != labels_o.end()) {
      r.label_o = it->second;
    }
  }
  if (!r.label_a) {
    if (auto it = labels_a.find(e.pair_id); it != labels_a.end()) {
      r.label_a = it->second;
    }
  }
  return r;
}

/// Evaluates pairs on a bounded pool; results keep manifest order.
inline std::vector<PairResult> evaluate_pairs(
    const std::vector<PairEntry>& pairs, const RunConfig& cfg,
    const std::map<std::string, std::string>& labels_o = {},
    const std::map<std::string, std::string>& labels_a = {}) {
  std::vector<PairResult> results(pairs.size());
  const int n_workers = static_cast<int>(
      std::min<std::size_t>(std::max(cfg.workers, 1), pairs.size()));
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      results[i] = evaluate_pair(pairs[i], cfg, labels_o, labels_a);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < pairs.size(); i = next++) {
            results[i] = evaluate_pair(pairs[i], cfg, labels_o, labels_a);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["bilateral"] = {{"sigma_spatial", cfg.pipeline.bilateral.sigma_spatial},
                    {"sigma_range", cfg.pipeline.bilateral.sigma_range},
                    {"radius", cfg.pipeline.bilateral.radius}};
  j["color_on_albedo"] = cfg.color_on_albedo;
  j["metrics"] = cfg.metrics;
  j["reid_threshold"] = cfg.reid_threshold;
  return j;
}

/**
 * @brief Builds the report JSON: per-pair records, per-metric mean and
 * population std over pairs that produced the metric (manifest order), and
 * dataset-level metrics whose inputs were supplied.
 */
inline nlohmann::json build_report(const std::vector<PairResult>& results,
                                   const RunConfig& cfg) {
  nlohmann::json report;
  report["tool"] = {{"name", kToolName}, {"version", kVersion}};
  report["run_name"] = cfg.run_name;
  report["config"] = config_echo(cfg);
  report["metrics"] = cfg.metrics;
  report["generated_at"] = utc_timestamp();

  nlohmann::json pairs = nlohmann::json::array();
  for (const PairResult& r : results) {
    nlohmann::json p;
    p["pair_id"] = r.pair_id;
    p["values"] = r.values;
    p["skipped"] = r.skipped;
    p["flags"] = r.flags;
    if (r.label_o) p["label_o"] = *r.label_o;
    if (r.label_a) p["label_a"] = *r.label_a;
    pairs.push_back(std::move(p));
  }
  report["pairs"] = std::move(pairs);

  nlohmann::json aggregates = nlohmann::json::object();
  for (const auto& name : pair_metric_names()) {
    if (!cfg.wants(name)) continue;
    std::vector<double> v;
    for (const PairResult& r : results) {
      if (auto it = r.values.find(name); it != r.values.end()) {
        v.push_back(it->second);
      }
    }
    if (v.empty()) continue;
    const Aggregate a = aggregate(v);
    aggregates[name] = {{"mean", a.mean}, {"std", a.std}, {"count", a.count}};
  }
  report["aggregates"] = std::move(aggregates);

  nlohmann::json dataset = nlohmann::json::object();
  nlohmann::json dataset_skipped = nlohmann::json::object();
  if (cfg.wants(metric::kReidRate)) {
    std::vector<double> sims;
    for (const PairResult& r : results) {
      if (auto it = r.values.find(metric::kCosineSimilarity);
          it != r.values.end()) {
        sims.push_back(it->second);
      }
    }
    if (sims.empty()) {
      dataset_skipped[metric::kReidRate] = "no cosine similarities";
    } else {
      dataset[metric::kReidRate] = reid_rate(sims, cfg.reid_threshold);
    }
  }
  if (cfg.wants(metric::kEmotionAgreement)) {
    std::vector<EmotionPair> labels;
    for (const PairResult& r : results) {
      if (r.label_o && r.label_a) labels.push_back({*r.label_o, *r.label_a});
    }
    if (labels.empty()) {
      dataset_skipped[metric::kEmotionAgreement] = "no emotion labels";
    } else {
      dataset[metric::kEmotionAgreement] = emotion_agreement(labels);
    }
  }
  if (cfg.wants(metric::kFid)) {
    if (cfg.features_real && cfg.features_fake) {
      dataset[metric::kFid] = fid(parse_feature_matrix(*cfg.features_real),
                                  parse_feature_matrix(*cfg.features_fake));
    } else {
      dataset_skipped[metric::kFid] = "feature files not supplied";
    }
  }
  if (cfg.wants(metric::kDetectionRate)) {
    if (cfg.detections) {
      dataset[metric::kDetectionRate] =
          detection_rate(parse_detections(*cfg.detections));
    } else {
      dataset_skipped[metric::kDetectionRate] = "detection records not supplied";
    }
  }
  report["dataset"] = std::move(dataset);
  report["dataset_skipped"] = std::move(dataset_skipped);
  return report;
}

/// Full evaluate flow short of writing: manifest -> per-pair -> report.
inline nlohmann::json evaluate_manifest(const std::filesystem::path& manifest,
                                        const RunConfig& cfg) {
  cfg.validate();
  const std::vector<PairEntry> pairs = read_manifest(manifest);
  if (pairs.empty()) throw NothingEvaluableError("manifest has no pairs");
  std::map<std::string, std::string> labels_o;
  std::map<std::string, std::string> labels_a;
  if (cfg.labels_o) labels_o = parse_labels(*cfg.labels_o);
  if (cfg.labels_a) labels_a = parse_labels(*cfg.labels_a);

  const std::vector<PairResult> results =
      evaluate_pairs(pairs, cfg, labels_o, labels_a);
  const bool any = std::any_of(results.begin(), results.end(),
                               [](const auto& r) { return !r.values.empty(); });
  if (!any) {
    throw NothingEvaluableError("no pair produced any requested metric");
  }
  return build_report(results, cfg);
}

inline std::string dump_report(const nlohmann::json& report) {
  return report.dump(2) + "\n";
}

}  // namespace anonfix::app
