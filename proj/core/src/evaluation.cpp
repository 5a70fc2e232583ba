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

#include "pareido/evaluation.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include "pareido/error.hpp"

namespace pareido {

ImageEvaluation evaluate_image(const ImageRecord& image, const PredictionRecord* record,
                               double iou_threshold) {
  ImageEvaluation ev;
  ev.image = &image;
  ev.match = match_record(image, record, iou_threshold);
  ev.region_predictions.resize(image.regions.size());
  for (std::size_t r = 0; r < ev.match.regions.size(); ++r) {
    const RegionMatch& rm = ev.match.regions[r];
    if (!rm.matched) continue;
    const std::size_t idx = *rm.matched_box_index;
    ev.region_predictions[r] = record->mode == PredictionMode::BoxLevel
                                   ? record->region_preds[idx].distribution
                                   : record->boxes[idx].distribution;
  }
  return ev;
}

std::vector<ModelEvaluation> evaluate_models(const Corpus& corpus,
                                             std::span<const PredictionRecord> records,
                                             double iou_threshold) {
  std::unordered_map<std::string_view, const ImageRecord*> by_id;
  for (const auto& img : corpus) by_id.emplace(img.image_id, &img);

  std::map<std::string, std::unordered_map<std::string_view, const PredictionRecord*>> per_model;
  std::map<std::string, std::set<std::string>> unknown;
  for (const auto& rec : records) {
    auto& slot = per_model[rec.model_id];
    if (!by_id.count(rec.image_id)) {
      unknown[rec.model_id].insert(rec.image_id);
      continue;
    }
    if (!slot.emplace(rec.image_id, &rec).second) {
      throw_validation("duplicate prediction record for model '" + rec.model_id + "', image '" +
                       rec.image_id + "'");
    }
  }

  std::vector<ModelEvaluation> out;
  for (const auto& [model_id, recs] : per_model) {
    if (recs.empty()) {
      throw_validation("predictions for model '" + model_id + "' share no image with the corpus");
    }
    ModelEvaluation me;
    me.model_id = model_id;
    me.images.reserve(corpus.size());
    for (const auto& img : corpus) {
      auto it = recs.find(img.image_id);
      me.images.push_back(evaluate_image(img, it == recs.end() ? nullptr : it->second, iou_threshold));
    }
    if (auto u = unknown.find(model_id); u != unknown.end()) {
      me.unknown_images.assign(u->second.begin(), u->second.end());
    }
    out.push_back(std::move(me));
  }
  return out;
}

}  // namespace pareido
