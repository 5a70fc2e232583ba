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

#include "pareido/matching.hpp"

#include <algorithm>
#include <unordered_map>

#include "pareido/error.hpp"

namespace pareido {

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool center_inside(const Box& pred, const Box& gt) {
  const double cx = pred.center_x();
  const double cy = pred.center_y();
  return cx >= gt.x_min && cx < gt.x_max && cy >= gt.y_min && cy < gt.y_max;
}

bool is_candidate(const Box& pred, const Box& gt, double iou_threshold) {
  return iou(pred, gt) >= iou_threshold || center_inside(pred, gt);
}

namespace {

MatchResult empty_result(const ImageRecord& image) {
  MatchResult result;
  result.image_id = image.image_id;
  result.primary_index = image.primary_index();
  result.regions.reserve(image.regions.size());
  for (const auto& r : image.regions) result.regions.push_back({r.region_id, false, std::nullopt, 0.0, false});
  return result;
}

}  // namespace

MatchResult match_image(const ImageRecord& image, std::span<const Box> predictions,
                        double iou_threshold) {
  MatchResult result = empty_result(image);
  const Box& primary_box = image.regions[result.primary_index].box;

  struct Pair {
    double iou;
    std::size_t region;
    std::size_t pred;
    bool center_only;
  };
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < image.regions.size(); ++r) {
    const Box& gt = image.regions[r].box;
    for (std::size_t p = 0; p < predictions.size(); ++p) {
      const double v = iou(predictions[p], gt);
      const bool by_iou = v >= iou_threshold;
      if (by_iou || center_inside(predictions[p], gt)) pairs.push_back({v, r, p, !by_iou});
    }
  }
  for (const Box& p : predictions) {
    if (is_candidate(p, primary_box, iou_threshold)) {
      result.any_prediction_on_primary = true;
      break;
    }
  }

  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.region != b.region) return a.region < b.region;
    return a.pred < b.pred;
  });

  std::vector<bool> pred_used(predictions.size(), false);
  for (const Pair& pair : pairs) {
    RegionMatch& rm = result.regions[pair.region];
    if (rm.matched || pred_used[pair.pred]) continue;
    rm.matched = true;
    rm.matched_box_index = pair.pred;
    rm.iou = pair.iou;
    rm.via_center_only = pair.center_only;
    pred_used[pair.pred] = true;
  }
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    if (!pred_used[p]) result.unmatched_prediction_indices.push_back(p);
  }
  return result;
}

MatchResult match_image(const ImageRecord& image, std::span<const PredictedBox> predictions,
                        double iou_threshold) {
  std::vector<Box> boxes;
  boxes.reserve(predictions.size());
  for (const auto& p : predictions) boxes.push_back(p.box);
  return match_image(image, std::span<const Box>(boxes), iou_threshold);
}

MatchResult match_box_level(const ImageRecord& image, std::span<const BoxLevelPrediction> predictions) {
  MatchResult result = empty_result(image);
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < image.regions.size(); ++i) by_id.emplace(image.regions[i].region_id, i);

  for (std::size_t p = 0; p < predictions.size(); ++p) {
    auto it = by_id.find(predictions[p].region_id);
    if (it == by_id.end()) {
      throw_validation("image " + image.image_id + ": region_id '" + predictions[p].region_id +
                       "' does not resolve");
    }
    RegionMatch& rm = result.regions[it->second];
    if (rm.matched) {
      throw_validation("image " + image.image_id + ": duplicate prediction for region " +
                       predictions[p].region_id);
    }
    rm.matched = true;
    rm.matched_box_index = p;
    rm.iou = 1.0;
  }
  result.any_prediction_on_primary = result.regions[result.primary_index].matched;
  return result;
}

MatchResult match_record(const ImageRecord& image, const PredictionRecord* record, double iou_threshold) {
  if (record == nullptr) return empty_result(image);
  if (record->mode == PredictionMode::BoxLevel) return match_box_level(image, record->region_preds);
  return match_image(image, std::span<const PredictedBox>(record->boxes), iou_threshold);
}

}  // namespace pareido
