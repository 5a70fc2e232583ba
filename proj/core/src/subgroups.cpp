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

#include "pareido/subgroups.hpp"

#include <map>

#include "pareido/error.hpp"

namespace pareido {

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::Difficulty: return "difficulty";
    case Dimension::Emotion: return "emotion";
    case Dimension::GtClass: return "gt_class";
  }
  return "difficulty";
}

namespace {

template <typename KeyOf>
std::vector<SubgroupReport> partition(std::span<const ImageEvaluation> images, Dimension dim,
                                      const std::vector<std::string>& values, KeyOf key_of) {
  std::map<std::string, std::vector<ImageEvaluation>> buckets;
  for (const auto& v : values) buckets[v];
  for (const auto& ev : images) buckets[key_of(*ev.image)].push_back(ev);

  std::vector<SubgroupReport> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    const auto& subset = buckets[v];
    out.push_back({{dim, v}, subset.size(), core_metrics(subset)});
  }
  return out;
}

}  // namespace

std::vector<SubgroupReport> metrics_by_difficulty(std::span<const ImageEvaluation> images) {
  std::vector<std::string> values;
  for (Difficulty d : kAllDifficulties) values.emplace_back(to_string(d));
  return partition(images, Dimension::Difficulty, values,
                   [](const ImageRecord& img) { return std::string(to_string(img.difficulty)); });
}

std::vector<SubgroupReport> bias_by_emotion(std::span<const ImageEvaluation> images) {
  std::map<std::string, bool> seen;
  for (const auto& ev : images) seen[ev.image->emotion] = true;
  std::vector<std::string> values;
  for (const auto& [label, _] : seen) values.push_back(label);
  return partition(images, Dimension::Emotion, values,
                   [](const ImageRecord& img) { return img.emotion; });
}

std::vector<SubgroupReport> metrics_by_class(std::span<const ImageEvaluation> images) {
  std::vector<std::string> values;
  for (CoarseClass c : kAllClasses) values.emplace_back(to_string(c));
  return partition(images, Dimension::GtClass, values,
                   [](const ImageRecord& img) { return std::string(to_string(img.image_label)); });
}

std::vector<SubgroupReport> all_subgroups(std::span<const ImageEvaluation> images) {
  auto out = metrics_by_difficulty(images);
  for (auto* part : {&bias_by_emotion, &metrics_by_class}) {
    auto more = (*part)(images);
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  return out;
}

ConfusionMatrix ConfusionMatrix::from_counts(const CountMatrix5& counts) {
  ConfusionMatrix cm;
  cm.counts = counts;
  for (std::size_t y = 0; y < kNumClasses; ++y) {
    std::size_t total = 0;
    for (std::size_t c : counts[y]) total += c;
    cm.row_empty[y] = total == 0;
    if (total == 0) continue;
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      cm.rates[y][p] = static_cast<double>(counts[y][p]) / static_cast<double>(total);
    }
  }
  return cm;
}

ConfusionMatrix confusion_matrix(std::span<const ImageEvaluation> images) {
  CountMatrix5 counts{};
  for (const auto& ev : images) {
    for (std::size_t r = 0; r < ev.image->regions.size(); ++r) {
      const auto& pred = ev.region_predictions[r];
      if (!pred) continue;
      ++counts[index_of(ev.image->regions[r].label)][index_of(predicted_class(*pred))];
    }
  }
  return ConfusionMatrix::from_counts(counts);
}

DifferenceMap difference_map(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  if (a.corpus_fingerprint != b.corpus_fingerprint) {
    throw_validation("difference_map: confusion matrices come from different corpora");
  }
  if (a.iou_threshold != b.iou_threshold) {
    throw_validation("difference_map: confusion matrices use different matching thresholds");
  }
  DifferenceMap d;
  for (std::size_t y = 0; y < kNumClasses; ++y) {
    d.row_defined[y] = !a.row_empty[y] && !b.row_empty[y];
    if (!d.row_defined[y]) continue;
    for (std::size_t p = 0; p < kNumClasses; ++p) d.delta[y][p] = a.rates[y][p] - b.rates[y][p];
  }
  return d;
}

}  // namespace pareido
