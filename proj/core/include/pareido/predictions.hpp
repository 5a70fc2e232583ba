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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pareido/types.hpp"

namespace pareido {

inline constexpr double kDistributionSumTolerance = 1e-6;

/// Probability vector over the five coarse classes in canonical order.
class ClassDistribution {
 public:
  using Values = std::array<double, kNumClasses>;

  /// Throws Error(Validation) unless every entry is in [0, 1] and the entries
  /// sum to 1 within kDistributionSumTolerance.
  explicit ClassDistribution(const Values& values);

  static ClassDistribution one_hot(CoarseClass c);
  static ClassDistribution uniform();

  /// Empty string when `values` would be accepted, otherwise the reason.
  static std::string check(const Values& values);

  double operator[](CoarseClass c) const { return values_[index_of(c)]; }
  double operator[](std::size_t i) const { return values_[i]; }
  const Values& values() const { return values_; }

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;

 private:
  Values values_;
};

struct PredictedBox {
  Box box;
  ClassDistribution distribution;
  std::optional<double> raw_score;

  friend bool operator==(const PredictedBox&, const PredictedBox&) = default;
};

struct BoxLevelPrediction {
  std::string region_id;
  ClassDistribution distribution;

  friend bool operator==(const BoxLevelPrediction&, const BoxLevelPrediction&) = default;
};

enum class PredictionMode { FullImage, BoxLevel };

std::string_view to_string(PredictionMode m);
std::optional<PredictionMode> parse_prediction_mode(std::string_view text);

struct PredictionRecord {
  std::string image_id;
  std::string model_id;
  PredictionMode mode = PredictionMode::FullImage;
  std::vector<PredictedBox> boxes;              // full_image mode
  std::vector<BoxLevelPrediction> region_preds;  // box_level mode

  /// Empty when the record is internally consistent.
  std::string validate() const;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct PredictionFile {
  std::vector<PredictionRecord> records;  // ordered by (image_id, line)
  std::vector<LineError> errors;
};

/// Parses one wire-format line. Throws Error(Validation) on any problem.
PredictionRecord parse_prediction_line(std::string_view line);
std::string prediction_to_json_line(const PredictionRecord& record);

/// Lenient reader: valid lines become records, invalid lines are reported
/// with their line number and skipped.
PredictionFile parse_predictions(std::string_view text);
PredictionFile read_predictions(const std::filesystem::path& path);

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records);

/// How a detector confidence for a mapped class becomes a distribution.
enum class ScoreConversion {
  ResidualToOther,  // score on the mapped class, 1 - score on Other
  OneHot,           // all mass on the mapped class, confidence discarded
};

std::string_view to_string(ScoreConversion c);
std::optional<ScoreConversion> parse_score_conversion(std::string_view text);

/// Throws Error(Validation) when score is outside [0, 1].
ClassDistribution score_to_distribution(CoarseClass mapped_class, double score,
                                        ScoreConversion conversion = ScoreConversion::ResidualToOther);

}  // namespace pareido
