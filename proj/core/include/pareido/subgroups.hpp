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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pareido/evaluation.hpp"
#include "pareido/metrics.hpp"

namespace pareido {

enum class Dimension { Difficulty, Emotion, GtClass };

std::string_view to_string(Dimension d);

struct SubgroupKey {
  Dimension dimension = Dimension::Difficulty;
  std::string value;

  friend bool operator==(const SubgroupKey&, const SubgroupKey&) = default;
};

/// Core metrics restricted to the images of one subgroup. `n` is the number
/// of images in the subgroup; empty subgroups carry undefined metrics.
struct SubgroupReport {
  SubgroupKey key;
  std::size_t n = 0;
  std::vector<MetricValue> metrics;
};

/// Always three entries, Easy, Medium, Hard.
std::vector<SubgroupReport> metrics_by_difficulty(std::span<const ImageEvaluation> images);
/// One entry per emotion label present, sorted by label. Emotions are used
/// verbatim, without valence grouping.
std::vector<SubgroupReport> bias_by_emotion(std::span<const ImageEvaluation> images);
/// Partition by image-level ground-truth class; always five entries.
std::vector<SubgroupReport> metrics_by_class(std::span<const ImageEvaluation> images);

/// Difficulty, then emotion, then class breakdowns.
std::vector<SubgroupReport> all_subgroups(std::span<const ImageEvaluation> images);

using Matrix5 = std::array<std::array<double, kNumClasses>, kNumClasses>;
using CountMatrix5 = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

/// Rows are ground-truth region classes, columns predicted classes, over
/// matched regions only.
struct ConfusionMatrix {
  CountMatrix5 counts{};
  Matrix5 rates{};  // row-normalized; zero rows where row_empty
  std::array<bool, kNumClasses> row_empty{};
  std::string corpus_fingerprint;
  double iou_threshold = 0.0;

  static ConfusionMatrix from_counts(const CountMatrix5& counts);
};

ConfusionMatrix confusion_matrix(std::span<const ImageEvaluation> images);

struct DifferenceMap {
  Matrix5 delta{};                         // a.rates - b.rates
  std::array<bool, kNumClasses> row_defined{};  // both rows non-empty; undefined rows are zero
};

/// Throws Error(Validation) when the matrices come from different corpora
/// or matching thresholds.
DifferenceMap difference_map(const ConfusionMatrix& a, const ConfusionMatrix& b);

}  // namespace pareido
