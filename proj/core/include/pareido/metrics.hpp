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
#include <string_view>
#include <vector>

#include "pareido/evaluation.hpp"
#include "pareido/gtbox_response.hpp"
#include "pareido/matching.hpp"
#include "pareido/predictions.hpp"

namespace pareido {

namespace metric {
inline constexpr std::string_view kDetectionRate = "detection_rate";
inline constexpr std::string_view kPpdr = "ppdr";
inline constexpr std::string_view kRai = "rai";
inline constexpr std::string_view kFbs = "fbs";
inline constexpr std::string_view kNonhumanToHuman = "nonhuman_to_human";
inline constexpr std::string_view kAlienToHuman = "alien_to_human";
inline constexpr std::string_view kResponseRate = "response_rate";
inline constexpr std::string_view kMeanHumanScore = "mean_human_score";
}  // namespace metric

/// A metric value together with the counts it was computed from.
///
/// For rates `value == numerator / denominator`. For RAI the numerator is
/// the summed entropy and the denominator the number of images included;
/// for the mean Human score it is the summed score over responding boxes.
/// `excluded` counts items dropped from the conditioning set (images without
/// matched regions for RAI, unmatched primaries for the image-level bias
/// rates, unlocalized non-Human regions for FBS). An empty conditioning set
/// leaves `value` unset; it is never reported as 0.
struct MetricValue {
  std::string name;
  std::optional<double> value;
  double numerator = 0.0;
  std::size_t denominator = 0;
  std::size_t excluded = 0;

  bool defined() const { return value.has_value(); }

  friend bool operator==(const MetricValue&, const MetricValue&) = default;
};

/// Aggregated distribution for one image with at least one matched region.
struct ImageDistribution {
  std::string image_id;
  ClassDistribution p;
  std::size_t n_matched = 0;
};

// Detection and localization. Both throw Error(Validation) on empty input.
MetricValue detection_rate(std::span<const MatchResult> matches);
MetricValue ppdr(std::span<const MatchResult> matches);

/// Element-wise mean, renormalized. Throws Error(Validation) on empty input.
ClassDistribution aggregate_image_distribution(std::span<const ClassDistribution> matched);

/// Shannon entropy in nats, 0 ln 0 := 0. In [0, ln 5].
double entropy(const ClassDistribution& p);

/// Images with no matched region are skipped.
std::vector<ImageDistribution> image_distributions(std::span<const ImageEvaluation> images);

/// Mean entropy; `excluded` is not known here and left 0.
MetricValue rai(std::span<const ImageDistribution> image_dists);
/// RAI over evaluated images, reporting images without matches as excluded.
MetricValue rai(std::span<const ImageEvaluation> images);

/// Argmax; exact ties resolve to the later class in canonical order.
CoarseClass predicted_class(const ClassDistribution& p);

MetricValue fbs(std::span<const ImageEvaluation> images);
MetricValue nonhuman_to_human_rate(std::span<const ImageEvaluation> images);
MetricValue alien_to_human_rate(std::span<const ImageEvaluation> images);

/// Throws Error(Validation) on empty input.
MetricValue response_rate(std::span<const GtBoxResponse> responses);
/// Undefined (not 0) when no box responded.
MetricValue mean_human_score(std::span<const GtBoxResponse> responses);

/// detection_rate, ppdr, rai, fbs, nonhuman_to_human, alien_to_human, in
/// that order. An empty input yields undefined values with zero counts.
std::vector<MetricValue> core_metrics(std::span<const ImageEvaluation> images);

/// response_rate and mean_human_score; empty input yields undefined values.
std::vector<MetricValue> response_metrics(std::span<const GtBoxResponse> responses);

}  // namespace pareido
