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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "pareido/corpus.hpp"
#include "pareido/error.hpp"
#include "pareido/evaluation.hpp"
#include "pareido/kv_config.hpp"
#include "pareido/matching.hpp"
#include "pareido/synth.hpp"

namespace pareido {
namespace {

const double kLn5 = std::log(5.0);

TEST(SplitMix64, ReferenceSequence) {
  // First outputs for seed 1234567 from the reference implementation.
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
}

TEST(SplitMix64, UniformAndIndexRanges) {
  SplitMix64 rng(9);
  std::array<int, 7> hist{};
  for (int i = 0; i < 70000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ++hist[rng.index(7)];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(StratifiedCounts, Examples) {
  const std::vector<double> uniform(5, 0.2);
  EXPECT_EQ(stratified_counts(uniform, 100), (std::vector<std::size_t>{20, 20, 20, 20, 20}));
  const std::vector<double> alien = {0.3, 0.3, 0.2, 0.1, 0.1};
  EXPECT_EQ(stratified_counts(alien, 50)[3], 5u);
  const std::vector<double> thirds(3, 1.0 / 3.0);
  const auto c = stratified_counts(thirds, 100);
  EXPECT_EQ(c[0] + c[1] + c[2], 100u);
  for (std::size_t v : c) EXPECT_TRUE(v == 33 || v == 34);
  EXPECT_THROW(stratified_counts(std::vector<double>{0.5, 0.4}, 10), Error);
  EXPECT_THROW(stratified_counts(std::vector<double>{}, 10), Error);
}

TEST(GenerateCorpus, ExactMarginals) {
  SynthCorpusSpec spec;
  spec.n_images = 100;
  spec.seed = 5;
  const Corpus c = generate_corpus(spec);
  ASSERT_EQ(c.size(), 100u);
  std::map<CoarseClass, int> classes;
  for (const auto& img : c) {
    EXPECT_EQ(img.validate(), "");
    ++classes[img.image_label];
    EXPECT_EQ(img.primary().label, img.image_label);
    EXPECT_GE(img.regions.size(), 1u);
    EXPECT_LE(img.regions.size(), 3u);
    for (std::size_t a = 0; a < img.regions.size(); ++a) {
      for (std::size_t b = a + 1; b < img.regions.size(); ++b) {
        EXPECT_EQ(iou(img.regions[a].box, img.regions[b].box), 0.0);
      }
    }
  }
  for (CoarseClass k : kAllClasses) EXPECT_EQ(classes[k], 20);

  spec.n_images = 50;
  spec.class_mix = {0.3, 0.3, 0.2, 0.1, 0.1};
  int aliens = 0;
  for (const auto& img : generate_corpus(spec)) aliens += img.image_label == CoarseClass::Alien ? 1 : 0;
  EXPECT_EQ(aliens, 5);
}

TEST(GenerateCorpus, Deterministic) {
  SynthCorpusSpec spec;
  spec.n_images = 300;
  spec.seed = 77;
  EXPECT_EQ(corpus_to_jsonl(generate_corpus(spec)), corpus_to_jsonl(generate_corpus(spec)));
  const std::string a = corpus_to_jsonl(generate_corpus(spec));
  spec.seed = 78;
  EXPECT_NE(corpus_to_jsonl(generate_corpus(spec)), a);
}

TEST(Behavior, DeterministicForFixedSeed) {
  SynthCorpusSpec spec;
  spec.n_images = 200;
  const Corpus c = generate_corpus(spec);
  BehaviorConfig b = BehaviorConfig::preset(Mechanism::Abstention);
  b.seed = 4;
  EXPECT_EQ(predictions_to_jsonl(generate_behavior(c, b)), predictions_to_jsonl(generate_behavior(c, b)));
}

TEST(Behavior, PresetValues) {
  const auto s = BehaviorConfig::preset(Mechanism::Suppression);
  EXPECT_EQ(s.fire_rate, 0.05);
  EXPECT_EQ(s.human_pull, 0.9);
  EXPECT_EQ(s.entropy_level, 0.05);
  const auto a = BehaviorConfig::preset(Mechanism::Abstention);
  EXPECT_EQ(a.fire_rate, 1.0);
  EXPECT_EQ(a.human_pull, 0.2);
  EXPECT_EQ(a.entropy_level, 0.95);
  const auto o = BehaviorConfig::preset(Mechanism::Overactivation);
  EXPECT_EQ(o.fire_rate, 1.0);
  EXPECT_EQ(o.human_pull, 0.9);
  EXPECT_EQ(o.entropy_level, 0.2);
}

TEST(Behavior, InfeasibleConfigsRejected) {
  SynthCorpusSpec spec;
  spec.n_images = 20;
  const Corpus c = generate_corpus(spec);
  BehaviorConfig b;
  b.model_id = "m";
  b.human_pull = 1.0;
  b.entropy_level = 0.5;  // P(Human) = 1 forces entropy 0
  EXPECT_THROW(generate_behavior(c, b), Error);
  b.human_pull = 0.0;
  EXPECT_THROW(generate_behavior(c, b), Error);  // w > 0 puts mass w/5 on Human
  b.human_pull = 0.9;
  b.entropy_level = 1.0;
  EXPECT_THROW(generate_behavior(c, b), Error);
  b.human_pull = 0.2;
  EXPECT_NO_THROW(generate_behavior(c, b));
  b.human_pull = 1.0;
  b.entropy_level = 0.0;
  EXPECT_NO_THROW(generate_behavior(c, b));

  b.fire_rate = 1.5;
  EXPECT_NE(b.validate(), "");
  EXPECT_THROW(generate_behavior(c, b), Error);
}

TEST(Behavior, InfeasibleEmotionBiasRejected) {
  SynthCorpusSpec spec;
  spec.n_images = 40;
  spec.emotion_mix = {{"happy", 0.5}, {"scared", 0.5}};
  const Corpus c = generate_corpus(spec);
  BehaviorConfig b = BehaviorConfig::preset(Mechanism::Overactivation);
  b.emotion_bias["scared"] = 0.1;  // clamped to 1.0, unreachable at entropy 0.2
  EXPECT_THROW(generate_behavior(c, b), Error);
}

TEST(Entropy, MixtureBisection) {
  EXPECT_EQ(mixture_entropy(0.0), 0.0);
  EXPECT_NEAR(mixture_entropy(1.0), kLn5, 1e-12);
  for (double level : {0.05, 0.2, 0.5, 0.95}) {
    const double w = mixing_weight_for_entropy(level * kLn5);
    EXPECT_NEAR(mixture_entropy(w), level * kLn5, 1e-5);
  }
  // Monotone in w.
  double prev = -1;
  for (int i = 0; i <= 100; ++i) {
    const double h = mixture_entropy(i / 100.0);
    EXPECT_GT(h, prev);
    prev = h;
  }
  EXPECT_EQ(mixing_weight_for_entropy(0.0), 0.0);
  EXPECT_EQ(mixing_weight_for_entropy(kLn5), 1.0);
  EXPECT_THROW(mixing_weight_for_entropy(2.0), Error);
  EXPECT_THROW(mixing_weight_for_entropy(-0.1), Error);
}

TEST(Behavior, ExpectedHumanMassMatchesPull) {
  SynthCorpusSpec spec;
  spec.n_images = 5000;
  spec.seed = 1;
  const Corpus c = generate_corpus(spec);
  BehaviorConfig b;
  b.model_id = "m";
  b.human_pull = 0.35;
  b.entropy_level = 0.5;
  b.seed = 2;
  b.mode = PredictionMode::BoxLevel;
  double mass = 0;
  std::size_t n = 0;
  for (const auto& rec : generate_behavior(c, b)) {
    for (const auto& rp : rec.region_preds) {
      mass += rp.distribution[CoarseClass::Human];
      ++n;
    }
  }
  EXPECT_NEAR(mass / double(n), 0.35, 0.02);
}

TEST(Behavior, FireRateAndModes) {
  SynthCorpusSpec spec;
  spec.n_images = 4000;
  const Corpus c = generate_corpus(spec);
  std::size_t regions = 0;
  for (const auto& img : c) regions += img.regions.size();

  BehaviorConfig b = BehaviorConfig::preset(Mechanism::Suppression);
  const auto full = generate_behavior(c, b);
  EXPECT_EQ(full.size(), c.size());  // full-image records exist even when empty
  std::size_t fired = 0;
  for (const auto& r : full) fired += r.boxes.size();
  const double p = 0.05;
  const double sd = std::sqrt(p * (1 - p) / double(regions));
  EXPECT_NEAR(double(fired) / double(regions), p, 4 * sd);

  b.mode = PredictionMode::BoxLevel;
  for (const auto& r : generate_behavior(c, b)) {
    EXPECT_TRUE(r.boxes.empty());
    EXPECT_FALSE(r.region_preds.empty());
  }
}

TEST(Behavior, LocalizationFailureBreaksCandidacy) {
  SynthCorpusSpec spec;
  spec.n_images = 300;
  const Corpus c = generate_corpus(spec);
  BehaviorConfig b = BehaviorConfig::preset(Mechanism::Overactivation);
  const auto near = generate_behavior(c, b);
  b.localization_noise = kLocalizationFailureJitter;
  const auto far = generate_behavior(c, b);
  ASSERT_EQ(near.size(), c.size());
  ASSERT_EQ(far.size(), c.size());
  std::size_t single = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& img = c[i];
    ASSERT_EQ(near[i].boxes.size(), img.regions.size());
    for (std::size_t k = 0; k < img.regions.size(); ++k) {
      EXPECT_TRUE(is_candidate(near[i].boxes[k].box, img.regions[k].box));
    }
    // With one region every emitted box comes from it.
    if (img.regions.size() != 1) continue;
    ++single;
    for (const auto& pb : far[i].boxes) EXPECT_FALSE(is_candidate(pb.box, img.regions[0].box)) << img.image_id;
  }
  EXPECT_GT(single, 50u);
}

TEST(BehaviorConfig, FromConfig) {
  const auto cfg = KvConfig::parse(
      "preset = abstention\nhuman_pull = 0.3\nseed = 9\nmode = box_level\nemotion_bias.Scared = 0.1\n"
      "localization_noise = localization-failure\n");
  const BehaviorConfig b = BehaviorConfig::from_config(cfg);
  EXPECT_EQ(b.mechanism, Mechanism::Abstention);
  EXPECT_EQ(b.fire_rate, 1.0);
  EXPECT_EQ(b.human_pull, 0.3);
  EXPECT_EQ(b.seed, 9u);
  EXPECT_EQ(b.mode, PredictionMode::BoxLevel);
  EXPECT_EQ(b.emotion_bias.at("scared"), 0.1);
  EXPECT_EQ(b.localization_noise, kLocalizationFailureJitter);
  EXPECT_EQ(b.model_id, "synth-abstention");

  EXPECT_THROW(BehaviorConfig::from_config(KvConfig::parse("preset = panic\n")), Error);
  EXPECT_THROW(BehaviorConfig::from_config(KvConfig::parse("preset = abstention\nfire_rate = 2\n")), Error);
  EXPECT_THROW(BehaviorConfig::from_config(KvConfig::parse("preset = abstention\nseed = -1\n")), Error);
}

}  // namespace
}  // namespace pareido
