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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pareido/matching.hpp"
#include "pareido/predictions.hpp"
#include "pareido/types.hpp"

namespace pareido {

/// Matching outcome for one image joined with the distributions of the
/// predictions each region was matched to.
struct ImageEvaluation {
  const ImageRecord* image = nullptr;
  MatchResult match;
  std::vector<std::optional<ClassDistribution>> region_predictions;  // set iff region matched
};

struct ModelEvaluation {
  std::string model_id;
  std::vector<ImageEvaluation> images;      // one per corpus image, corpus order
  std::vector<std::string> unknown_images;  // prediction image ids absent from the corpus
};

ImageEvaluation evaluate_image(const ImageRecord& image, const PredictionRecord* record,
                               double iou_threshold = kDefaultIouThreshold);

/// Groups records by model_id (alphabetical) and evaluates every corpus image
/// for each model; images without a record count as "no predictions".
/// Throws Error(Validation) on duplicate (model, image) records or when a
/// model's records share no image with the corpus.
std::vector<ModelEvaluation> evaluate_models(const Corpus& corpus,
                                             std::span<const PredictionRecord> records,
                                             double iou_threshold = kDefaultIouThreshold);

}  // namespace pareido
