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

// anonfix command-line tool.
//
// Exit codes: 0 ok, 2 input or I/O error, 3 shape mismatch, 4 nothing
// evaluable.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anonfix/app/evaluate.hpp"
#include "anonfix/app/fixtures.hpp"
#include "anonfix/app/report.hpp"
#include "anonfix/errors.hpp"
#include "anonfix/pipeline.hpp"
#include "anonfix/png_io.hpp"
#include "anonfix/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitShape = 3;
constexpr int kExitNothing = 4;

void add_pipeline_options(CLI::App* cmd, anonfix::PipelineConfig& p) {
  cmd->add_option("--levels", p.blend.levels, "Laplacian pyramid depth K")
      ->capture_default_str();
  cmd->add_option("--replaced-bands", p.blend.replaced_bands,
                  "Coarsest detail bands also taken from the relit image")
      ->capture_default_str();
  cmd->add_option("--sigma-spatial", p.bilateral.sigma_spatial,
                  "Bilateral spatial sigma in pixels (0: 2% of the diagonal)")
      ->capture_default_str();
  cmd->add_option("--sigma-range", p.bilateral.sigma_range,
                  "Bilateral range sigma on [0,1] intensities")
      ->capture_default_str();
  cmd->add_option("--radius", p.bilateral.radius,
                  "Bilateral window radius (0: ceil(2 * sigma-spatial))")
      ->capture_default_str();
  cmd->add_flag("!--no-relight", p.relight, "Skip shading transfer");
  cmd->add_flag("!--no-pyramid", p.pyramid, "Skip low-frequency blending");
  cmd->add_flag("!--no-color-transfer", p.color_transfer,
                "Skip chroma statistics matching");
}

int write_text(const std::optional<std::string>& out, const std::string& text) {
  if (!out || *out == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(*out, std::ios::binary);
  f << text;
  if (!f) throw anonfix::InputError("cannot write '" + *out + "'");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photometric post-processing and utility metrics for "
               "anonymized face images"};
  app.set_version_flag("--version", std::string(anonfix::kVersion));
  app.set_config("--config", "", "TOML key-value file; flags override it");
  app.require_subcommand(1);

  // postprocess
  anonfix::PipelineConfig pp_cfg;
  std::string pp_original;
  std::string pp_anonymized;
  std::string pp_out;
  std::string pp_mask;
  auto* pp = app.add_subcommand("postprocess",
                                "Relight, blend and colour-correct one pair");
  pp->add_option("--original", pp_original, "Original face image")->required();
  pp->add_option("--anonymized", pp_anonymized, "Anonymized face image")
      ->required();
  pp->add_option("-o,--out", pp_out, "Output PNG")->required();
  pp->add_option("--mask", pp_mask, "Face mask for colour statistics");
  add_pipeline_options(pp, pp_cfg);

  // evaluate
  anonfix::app::RunConfig ev_cfg;
  std::string ev_manifest;
  std::optional<std::string> ev_out;
  std::string ev_metrics;
  std::string features_real, features_fake, detections, labels_o, labels_a;
  auto* ev = app.add_subcommand("evaluate", "Compute metrics over a manifest");
  ev->add_option("--manifest", ev_manifest, "Manifest CSV")->required();
  ev->add_option("-o,--out", ev_out, "Report JSON (default stdout)");
  ev->add_option("--metrics", ev_metrics,
                 "Comma-separated metric list (default: all)");
  ev->add_option("--run-name", ev_cfg.run_name)->capture_default_str();
  ev->add_option("--reid-threshold", ev_cfg.reid_threshold,
                 "Cosine similarity above which a pair counts as re-identified")
      ->capture_default_str();
  ev->add_option("--workers", ev_cfg.workers, "Pair-level worker threads")
      ->envname("ANONFIX_WORKERS")
      ->capture_default_str();
  ev->add_flag("--color-on-albedo", ev_cfg.color_on_albedo,
               "Colour metrics on decomposition albedo");
  ev->add_option("--features-real", features_real, "Real feature matrix CSV");
  ev->add_option("--features-fake", features_fake,
                 "Generated feature matrix CSV");
  ev->add_option("--detections", detections, "Detection records CSV");
  ev->add_option("--labels-o", labels_o, "Original emotion labels CSV");
  ev->add_option("--labels-a", labels_a, "Anonymized emotion labels CSV");
  add_pipeline_options(ev, ev_cfg.pipeline);

  // report
  std::vector<std::string> rp_inputs;
  std::string rp_format = "csv";
  std::optional<std::string> rp_out;
  auto* rp = app.add_subcommand("report", "Render report JSON files as a table");
  rp->add_option("reports", rp_inputs, "Report JSON files, one row each")
      ->required();
  rp->add_option("-f,--format", rp_format, "csv, json or md")
      ->capture_default_str();
  rp->add_option("-o,--out", rp_out, "Output file (default stdout)");

  // fixtures
  anonfix::app::FixtureOptions fx_opts;
  std::string fx_out;
  auto* fx = app.add_subcommand("fixtures", "Write the synthetic test data set");
  fx->add_option("-o,--out", fx_out, "Output directory")->required();
  fx->add_option("--pairs", fx_opts.pairs)->capture_default_str();
  fx->add_option("--size", fx_opts.size)->capture_default_str();
  fx->add_option("--relight-size", fx_opts.relight_size)->capture_default_str();
  fx->add_option("--seed", fx_opts.seed)->capture_default_str();
  fx->add_flag("--perf", fx_opts.with_perf_pair,
               "Also write a 1024x1024 timing pair");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*pp) {
      if (pp_cfg.pyramid && pp_cfg.blend.levels < 1) {
        throw anonfix::InputError("pyramid levels must be >= 1");
      }
      const auto t0 = std::chrono::steady_clock::now();
      const anonfix::ImageF original = anonfix::load_image(pp_original);
      const anonfix::ImageF anonymized = anonfix::load_image(pp_anonymized);
      std::optional<anonfix::Mask> mask;
      if (!pp_mask.empty()) mask = anonfix::load_mask(pp_mask);
      const anonfix::ImageF out =
          anonfix::postprocess(original, anonymized, pp_cfg, mask);
      anonfix::save_image(out, pp_out);
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      std::fprintf(stderr, "post-processing wall time: %.3f s\n", secs);
      return kExitOk;
    }
    if (*ev) {
      if (!ev_metrics.empty()) {
        ev_cfg.metrics.clear();
        for (auto& m : anonfix::split_csv_line(ev_metrics)) {
          if (!anonfix::trim(m).empty()) {
            ev_cfg.metrics.push_back(std::string(anonfix::trim(m)));
          }
        }
      }
      auto opt_path = [](const std::string& s)
          -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return std::filesystem::path(s);
      };
      ev_cfg.features_real = opt_path(features_real);
      ev_cfg.features_fake = opt_path(features_fake);
      ev_cfg.detections = opt_path(detections);
      ev_cfg.labels_o = opt_path(labels_o);
      ev_cfg.labels_a = opt_path(labels_a);
      const auto report = anonfix::app::evaluate_manifest(ev_manifest, ev_cfg);
      return write_text(ev_out, anonfix::app::dump_report(report));
    }
    if (*rp) {
      const auto format = anonfix::app::parse_report_format(rp_format);
      std::vector<nlohmann::json> runs;
      for (const auto& p : rp_inputs) runs.push_back(anonfix::app::load_report(p));
      return write_text(rp_out, anonfix::app::render_report(runs, format));
    }
    if (*fx) {
      anonfix::app::write_fixtures(fx_out, fx_opts);
      return kExitOk;
    }
  } catch (const anonfix::ShapeError& e) {
    std::fprintf(stderr, "anonfix: %s\n", e.what());
    return kExitShape;
  } catch (const anonfix::app::NothingEvaluableError& e) {
    std::fprintf(stderr, "anonfix: %s\n", e.what());
    return kExitNothing;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "anonfix: %s\n", e.what());
    return kExitInput;
  }
  return kExitOk;
}
