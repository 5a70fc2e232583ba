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
#include <utility>
#include <vector>

#include "pareido/corpus.hpp"
#include "pareido/gtbox.hpp"
#include "pareido/matching.hpp"
#include "pareido/metrics.hpp"
#include "pareido/predictions.hpp"
#include "pareido/subgroups.hpp"

namespace pareido {

std::string_view tool_version();

struct InputFingerprint {
  std::string file;  // file name only, so reports do not depend on the working directory
  std::string hash;
};

/// Everything that determines a report besides the data itself.
struct RunManifest {
  std::string tool_version{pareido::tool_version()};
  std::string corpus_fingerprint;
  std::vector<InputFingerprint> prediction_fingerprints;
  std::vector<InputFingerprint> response_fingerprints;
  double iou_threshold = kDefaultIouThreshold;
  double padding_fraction = kDefaultPaddingFraction;
  std::string entropy_base = "natural";
  std::string matching_tie_break = "iou_desc,region_order,prediction_order";
  std::string argmax_tie_break = "later_canonical_class";
  std::optional<std::string> timestamp;  // caller-supplied; never read from the clock

  /// Hash over every field except the timestamp.
  std::string config_hash() const;
};

struct ModelReport {
  std::string model_id;
  std::size_t n_images = 0;
  std::vector<MetricValue> metrics;  // the eight named metrics
  std::vector<SubgroupReport> subgroups;
  ConfusionMatrix confusion;
  std::vector<std::string> warnings;
  std::optional<std::vector<MatchResult>> matches;
};

struct Comparison {
  std::string a;
  std::string b;
  DifferenceMap difference;
};

struct EvaluationReport {
  RunManifest manifest;
  std::vector<ModelReport> models;  // alphabetical by model_id
  std::vector<Comparison> comparisons;
};

struct EvaluateOptions {
  double iou_threshold = kDefaultIouThreshold;
  bool dump_matches = false;
  std::vector<std::pair<std::string, std::string>> compare;
};

/// Full evaluation: matching, the eight metrics, subgroup breakdowns and the
/// confusion matrix for every model in `predictions`. GT-box responses, when
/// given, feed response_rate and mean_human_score for the model of the same
/// id; otherwise those two stay undefined.
EvaluationReport build_evaluation_report(const Corpus& corpus, std::span<const PredictionRecord> predictions,
                                         std::span<const GtBoxResponse> responses,
                                         const EvaluateOptions& options, RunManifest manifest);

struct GtBoxScoreReport {
  RunManifest manifest;
  std::vector<GtBoxReport> models;
};

std::string report_to_json(const EvaluationReport& report);
std::string report_to_csv(const EvaluationReport& report);
std::string report_to_json(const GtBoxScoreReport& report);
std::string report_to_csv(const GtBoxScoreReport& report);

std::string match_result_to_json(const MatchResult& match);

}  // namespace pareido
