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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pareido/predictions.hpp"
#include "pareido/types.hpp"

namespace pareido {

inline constexpr double kDefaultIouThreshold = 0.2;

/// Intersection over union of two valid boxes; symmetric, in [0, 1].
double iou(const Box& a, const Box& b);

/// True iff the center of `pred` lies in the half-open extent of `gt`.
bool center_inside(const Box& pred, const Box& gt);

/// Relaxed spatial criterion: IoU at or above the threshold, or center inclusion.
bool is_candidate(const Box& pred, const Box& gt, double iou_threshold = kDefaultIouThreshold);

struct RegionMatch {
  std::string region_id;
  bool matched = false;
  std::optional<std::size_t> matched_box_index;
  double iou = 0.0;
  bool via_center_only = false;  // matched although IoU is below the threshold

  friend bool operator==(const RegionMatch&, const RegionMatch&) = default;
};

struct MatchResult {
  std::string image_id;
  std::vector<RegionMatch> regions;  // parallel to the image's regions
  std::size_t primary_index = 0;
  bool any_prediction_on_primary = false;  // d_i
  std::vector<std::size_t> unmatched_prediction_indices;

  /// m_i: the primary region received a prediction in the one-to-one assignment.
  bool primary_matched() const { return regions.at(primary_index).matched; }

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Greedy one-to-one assignment. Candidate pairs are ranked by IoU
/// descending, then region order, then prediction order; a pair is taken
/// when both its region and prediction are still free.
MatchResult match_image(const ImageRecord& image, std::span<const Box> predictions,
                        double iou_threshold = kDefaultIouThreshold);
MatchResult match_image(const ImageRecord& image, std::span<const PredictedBox> predictions,
                        double iou_threshold = kDefaultIouThreshold);

/// Box-level predictions address regions by id, so every region with a
/// prediction is matched with IoU 1. Throws Error(Validation) when a
/// region_id does not resolve against the image.
MatchResult match_box_level(const ImageRecord& image, std::span<const BoxLevelPrediction> predictions);

/// Dispatches on the record's mode; a null record means no predictions.
MatchResult match_record(const ImageRecord& image, const PredictionRecord* record,
                         double iou_threshold = kDefaultIouThreshold);

}  // namespace pareido
