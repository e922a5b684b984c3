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

#include <optional>

#include "anonfix/image.hpp"
#include "anonfix/intrinsic.hpp"
#include "anonfix/pyramid.hpp"
#include "anonfix/transfer.hpp"

namespace anonfix {

/// Stage toggles of the photometric correction. A disabled stage passes
/// its input through unchanged.
struct PipelineConfig {
  bool relight = true;
  bool pyramid = true;
  bool color_transfer = true;
  BlendOptions blend;
  BilateralParams bilateral;
};

/**
 * @brief Photometric correction of an anonymized face.
 *
 *   relit = albedo(anonymized) * shading(original)
 *   blend = detail bands of anonymized + coarse residual of relit
 *   out   = chroma statistics of blend matched to original
 *
 * The optional mask restricts the colour statistics to a face region.
 */
inline ImageF postprocess(const ImageF& original, const ImageF& anonymized,
                          const PipelineConfig& cfg,
                          const std::optional<Mask>& mask = {}) {
  require_same_shape(original, anonymized, "postprocess");
  require_mask_shape(original, mask, "postprocess");

  ImageF relit = anonymized;
  if (cfg.relight) {
    const Decomposition anon = decompose(anonymized, cfg.bilateral);
    const Decomposition orig = decompose(original, cfg.bilateral);
    relit = relight(anon.albedo, orig.shading);
  }

  ImageF blended =
      cfg.pyramid ? blend_low_frequency(anonymized, relit, cfg.blend)
                  : std::move(relit);

  if (!cfg.color_transfer) return blended;
  return color_transfer(blended, original, mask);
}

}  // namespace anonfix
