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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pareido/kv_config.hpp"
#include "pareido/predictions.hpp"
#include "pareido/types.hpp"

namespace pareido {

/// SplitMix64. Used instead of the <random> engines and distributions so
/// synthetic outputs are identical across standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  /// Uniform integer in [0, n); n > 0.
  std::size_t index(std::size_t n);

 private:
  std::uint64_t state_;
};

/// Seed for one image, derived from the run seed and the image id so images
/// can be generated independently.
std::uint64_t image_seed(std::uint64_t seed, std::string_view image_id);

/// Largest-remainder allocation of n items to the categories of `mix`.
/// Throws Error(Validation) when mix is not a distribution.
std::vector<std::size_t> stratified_counts(std::span<const double> mix, std::size_t n);

struct SynthCorpusSpec {
  std::size_t n_images = 1000;
  std::array<double, kNumClasses> class_mix{0.2, 0.2, 0.2, 0.2, 0.2};
  std::array<double, kNumDifficulties> difficulty_mix{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::vector<std::pair<std::string, double>> emotion_mix = default_emotion_mix();
  std::uint64_t seed = 0;

  static std::vector<std::pair<std::string, double>> default_emotion_mix();
};

/// Image-level class, difficulty and emotion marginals are exact (stratified
/// allocation, then shuffled). Each 600x600 image has one to three
/// non-overlapping regions placed in distinct cells of a 3x3 grid.
Corpus generate_corpus(const SynthCorpusSpec& spec);

enum class Mechanism { Overactivation, Abstention, Suppression };

std::string_view to_string(Mechanism m);
std::optional<Mechanism> parse_mechanism(std::string_view text);

inline constexpr double kDefaultJitter = 0.1;
/// Displaces predicted boxes far enough that the candidate rule fails.
inline constexpr double kLocalizationFailureJitter = 1.5;

struct BehaviorConfig {
  Mechanism mechanism = Mechanism::Overactivation;
  double human_pull = 0.5;     // expected probability mass on Human
  double entropy_level = 0.5;  // target entropy as a fraction of ln 5
  double fire_rate = 1.0;      // per-region probability of emitting a prediction
  std::map<std::string, double> emotion_bias;  // additive human_pull delta per emotion
  double localization_noise = kDefaultJitter;  // box jitter as a fraction of box size
  std::uint64_t seed = 0;
  std::string model_id;
  PredictionMode mode = PredictionMode::FullImage;

  static BehaviorConfig preset(Mechanism m);
  /// Keys: preset, mechanism, human_pull, entropy_level, fire_rate,
  /// localization_noise (number or "localization-failure"), seed, model_id,
  /// mode, and emotion_bias.<label>.
  static BehaviorConfig from_config(const KvConfig& cfg);

  /// Empty when every rate is in range.
  std::string validate() const;
};

/// Entropy in nats of (1 - w) * one_hot + w * uniform.
double mixture_entropy(double w);

/// Bisection (tolerance 1e-6 in w) for the mixing weight whose mixture has
/// the requested entropy. Target in [0, ln 5].
double mixing_weight_for_entropy(double target_entropy);

/// Per region: fires with probability fire_rate; a fired region gets a
/// jittered copy of its box and the distribution (1 - w) one_hot(t) + w uniform,
/// with w set by the entropy target and the target class t drawn so the
/// expected Human mass equals clamp(human_pull + emotion_bias[emotion]).
/// Throws Error(Validation) when that Human mass is unreachable at the
/// requested entropy.
std::vector<PredictionRecord> generate_behavior(const Corpus& corpus, const BehaviorConfig& config);

}  // namespace pareido
