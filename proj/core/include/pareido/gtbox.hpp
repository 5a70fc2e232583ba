// Copyright 2026 The Pareido Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pareido/gtbox_response.hpp"
#include "pareido/metrics.hpp"
#include "pareido/subgroups.hpp"
#include "pareido/types.hpp"

namespace pareido {

inline constexpr double kDefaultPaddingFraction = 0.2;

/// Padded crop around one annotated region, clipped to the image.
struct CropSpec {
  std::string image_id;
  std::string region_id;
  Box crop;
  double padding = 0.0;

  friend bool operator==(const CropSpec&, const CropSpec&) = default;
};

/// Expands each region by padding_fraction times its width (horizontally)
/// and height (vertically) on every side, then clips to [0, width] x [0, height].
/// Throws Error(Validation) for a negative or non-finite padding.
std::vector<CropSpec> emit_crop_specs(const Corpus& corpus, double padding_fraction = kDefaultPaddingFraction);

std::string crop_specs_to_jsonl(std::span<const CropSpec> specs);
std::vector<CropSpec> parse_crop_specs(std::string_view text);

// GtBoxResponse file: {image_id, region_id, model_id, responded, human_score}.
std::string responses_to_jsonl(std::span<const GtBoxResponse> responses);
/// Strict: throws Error(Validation) naming the first bad line.
std::vector<GtBoxResponse> parse_responses(std::string_view text);
std::vector<GtBoxResponse> read_responses(const std::filesystem::path& path);

struct GtBoxReport {
  std::string model_id;
  std::vector<MetricValue> metrics;  // response_rate, mean_human_score
  std::vector<SubgroupReport> by_difficulty;
};

/// One report per model id (alphabetical). Throws Error(Validation) when a
/// response names an image or region missing from the corpus, or repeats a
/// (model, image, region) triple.
std::vector<GtBoxReport> score_gtbox(std::span<const GtBoxResponse> responses, const Corpus& corpus);

}  // namespace pareido
