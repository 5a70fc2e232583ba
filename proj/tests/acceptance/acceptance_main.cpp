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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "greedy_replay.hpp"
#include "naive_metrics.hpp"
#include "pareido/corpus.hpp"
#include "pareido/evaluation.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/matching.hpp"
#include "pareido/metrics.hpp"
#include "pareido/report.hpp"
#include "pareido/subgroups.hpp"
#include "pareido/synth.hpp"
#include "random_fixtures.hpp"

namespace pareido::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const double kLn5 = std::log(5.0);

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::vector<ImageEvaluation> evaluate_all(const Corpus& corpus, const std::vector<PredictionRecord>& records,
                                          double threshold = kDefaultIouThreshold) {
  std::map<std::string, const PredictionRecord*> by_image;
  for (const auto& r : records) by_image.emplace(r.image_id, &r);
  std::vector<ImageEvaluation> out;
  out.reserve(corpus.size());
  for (const auto& img : corpus) {
    auto it = by_image.find(img.image_id);
    out.push_back(evaluate_image(img, it == by_image.end() ? nullptr : it->second, threshold));
  }
  return out;
}

const MetricValue& find_metric(const std::vector<MetricValue>& ms, std::string_view name) {
  for (const auto& m : ms) {
    if (m.name == name) return m;
  }
  throw Failure{"metric missing: " + std::string(name)};
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fmt_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome metric_oracle() {
  constexpr int kCorpora = 1000;
  testing::Rng rng(20261015);
  const std::vector<double> thresholds = {0.2, 0.2, 0.1, 0.5};
  double worst = 0.0;
  for (int trial = 0; trial < kCorpora; ++trial) {
    const Corpus corpus = testing::random_corpus(rng, 10, 5);
    const auto records = testing::random_records(rng, corpus, "m");
    const auto responses = testing::random_responses(rng, corpus, "m");
    const double t = thresholds[std::size_t(trial) % thresholds.size()];

    std::map<std::string, PredictionRecord> by_image;
    for (const auto& r : records) by_image.emplace(r.image_id, r);
    auto got = core_metrics(evaluate_all(corpus, records, t));
    for (auto& v : response_metrics(responses)) got.push_back(v);
    const oracle::NaiveMetrics want = oracle::naive_metrics(corpus, by_image, t, responses);

    const std::vector<std::pair<std::string_view, std::optional<double>>> expected = {
        {metric::kDetectionRate, want.detection_rate}, {metric::kPpdr, want.ppdr},
        {metric::kRai, want.rai},                      {metric::kFbs, want.fbs},
        {metric::kNonhumanToHuman, want.nonhuman_to_human},
        {metric::kAlienToHuman, want.alien_to_human},  {metric::kResponseRate, want.response_rate},
        {metric::kMeanHumanScore, want.mean_human_score}};
    for (const auto& [name, value] : expected) {
      const auto& m = find_metric(got, name);
      require(m.value.has_value() == value.has_value(),
              std::string(name) + " definedness differs on corpus " + std::to_string(trial));
      if (value) {
        const double d = std::abs(*m.value - *value);
        worst = std::max(worst, d);
        require(d <= 1e-9, std::string(name) + " differs by " + fmt_sci(d) + " on corpus " + std::to_string(trial));
      }
    }
  }
  return {true, std::to_string(kCorpora) + " corpora x 8 metrics, max |diff| " + fmt_sci(worst)};
}

Outcome matching_oracle() {
  constexpr int kInstances = 2000;
  testing::Rng rng(7331);
  const std::vector<double> ladder = {0.0, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0};
  std::size_t matched_pairs = 0;
  for (int trial = 0; trial < kInstances; ++trial) {
    const ImageRecord img = testing::random_image(rng, "i", 5);
    const auto preds = testing::random_predictions_for(rng, img, 8);
    std::vector<Box> gts;
    for (const auto& r : img.regions) gts.push_back(r.box);

    std::set<std::pair<std::size_t, std::size_t>> prev_candidates;
    bool prev_d = true;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      const double t = ladder[li];
      const MatchResult m = match_image(img, preds, t);
      const oracle::Replay rep = oracle::greedy_replay(gts, img.primary_index(), preds, t);
      const std::string where = "instance " + std::to_string(trial) + " threshold " + fmt(t, 1);

      require(m.any_prediction_on_primary == rep.any_on_primary, "d_i differs, " + where);
      std::set<std::size_t> used;
      for (std::size_t r = 0; r < gts.size(); ++r) {
        const int e = rep.region_to_pred[r];
        require(m.regions[r].matched == (e >= 0), "assignment differs, " + where);
        if (e < 0) continue;
        require(*m.regions[r].matched_box_index == std::size_t(e), "assignment differs, " + where);
        require(m.regions[r].iou == rep.region_iou[r], "IoU differs, " + where);
        require(used.insert(std::size_t(e)).second, "prediction used twice, " + where);
        ++matched_pairs;
      }
      require(used.size() + m.unmatched_prediction_indices.size() == preds.size(),
              "unmatched list inconsistent, " + where);

      std::set<std::pair<std::size_t, std::size_t>> candidates;
      for (std::size_t r = 0; r < gts.size(); ++r) {
        for (std::size_t p = 0; p < preds.size(); ++p) {
          if (is_candidate(preds[p], gts[r], t)) candidates.insert({r, p});
        }
      }
      if (li > 0) {
        require(std::includes(prev_candidates.begin(), prev_candidates.end(), candidates.begin(), candidates.end()),
                "candidate set grew with threshold, " + where);
        require(prev_d || !m.any_prediction_on_primary, "detection appeared at higher threshold, " + where);
      }
      prev_candidates = std::move(candidates);
      prev_d = m.any_prediction_on_primary;
    }
  }
  return {true, std::to_string(kInstances) + " instances x " + std::to_string(ladder.size()) +
                    " thresholds, " + std::to_string(matched_pairs) + " matched pairs"};
}

Outcome entropy_identities() {
  for (CoarseClass c : kAllClasses) require(entropy(ClassDistribution::one_hot(c)) == 0.0, "one-hot entropy not 0");
  const double hu = entropy(ClassDistribution::uniform());
  require(std::abs(hu - kLn5) <= 1e-12, "uniform entropy off by " + fmt_sci(std::abs(hu - kLn5)));

  constexpr int kDists = 10000;
  testing::Rng rng(555);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_perm = 0.0;
  double lo = kLn5, hi = 0.0;
  for (int i = 0; i < kDists; ++i) {
    ClassDistribution::Values v{};
    double s = 0;
    const int support = testing::rand_int(rng, 1, 5);
    for (int k = 0; k < support; ++k) {
      v[std::size_t(k)] = u(rng);
      s += v[std::size_t(k)];
    }
    if (s == 0) v[0] = s = 1;
    for (auto& x : v) x /= s;
    std::shuffle(v.begin(), v.end(), rng);
    const double h = entropy(ClassDistribution(v));
    require(h >= 0.0 && h <= kLn5, "entropy out of [0, ln 5]: " + fmt(h, 12));
    lo = std::min(lo, h);
    hi = std::max(hi, h);
    auto p = v;
    std::shuffle(p.begin(), p.end(), rng);
    worst_perm = std::max(worst_perm, std::abs(entropy(ClassDistribution(p)) - h));
  }
  require(worst_perm <= 1e-12, "permutation changes entropy by " + fmt_sci(worst_perm));
  return {true, std::to_string(kDists) + " distributions, range [" + fmt(lo) + ", " + fmt(hi) +
                    "], max permutation diff " + fmt_sci(worst_perm)};
}

/// Synth corpus and behavior serialized to the wire formats and read back,
/// then evaluated through the report builder.
EvaluationReport synth_end_to_end(Mechanism m, std::size_t n, std::uint64_t seed) {
  SynthCorpusSpec spec;
  spec.n_images = n;
  spec.seed = seed;
  BehaviorConfig b = BehaviorConfig::preset(m);
  b.seed = seed;
  const Corpus corpus = parse_corpus(corpus_to_jsonl(generate_corpus(spec)));
  const PredictionFile preds = parse_predictions(predictions_to_jsonl(generate_behavior(corpus, b)));
  require(preds.errors.empty(), "synthetic predictions failed to parse");
  return build_evaluation_report(corpus, preds.records, {}, EvaluateOptions{}, RunManifest{});
}

Outcome mechanism_separation() {
  constexpr std::size_t kN = 2000;
  constexpr std::uint64_t kSeed = 7;
  const auto sup = synth_end_to_end(Mechanism::Suppression, kN, kSeed).models.at(0).metrics;
  const auto abs = synth_end_to_end(Mechanism::Abstention, kN, kSeed).models.at(0).metrics;
  const auto ovr = synth_end_to_end(Mechanism::Overactivation, kN, kSeed).models.at(0).metrics;

  const double sup_dr = *find_metric(sup, metric::kDetectionRate).value;
  const double abs_rai = *find_metric(abs, metric::kRai).value;
  const double abs_fbs = *find_metric(abs, metric::kFbs).value;
  const double ovr_fbs = *find_metric(ovr, metric::kFbs).value;
  const double ovr_rai = *find_metric(ovr, metric::kRai).value;

  const std::string detail = "suppression DR " + fmt(sup_dr) + " (<= 0.08); abstention RAI " + fmt(abs_rai) +
                             " (>= " + fmt(0.9 * kLn5) + "), FBS " + fmt(abs_fbs) +
                             " (<= 0.25); overactivation FBS " + fmt(ovr_fbs) + " (>= 0.8), RAI " +
                             fmt(ovr_rai) + " (<= " + fmt(0.4 * kLn5) + ")";
  const bool ok = sup_dr <= 0.08 && abs_rai >= 0.9 * kLn5 && abs_fbs <= 0.25 && ovr_fbs >= 0.8 &&
                  ovr_rai <= 0.4 * kLn5;
  return {ok, detail};
}

Outcome emotion_bias_recovery() {
  constexpr double kDelta = 0.3;
  SynthCorpusSpec spec;
  spec.n_images = 10000;
  spec.seed = 2026;
  spec.emotion_mix = {{"happy", 0.5}, {"scared", 0.5}};
  const Corpus corpus = generate_corpus(spec);

  // Crisp predictions so the predicted-Human rate equals the Human pull.
  BehaviorConfig b;
  b.mechanism = Mechanism::Overactivation;
  b.human_pull = 0.4;
  b.entropy_level = 0.0;
  b.fire_rate = 1.0;
  b.seed = 99;
  b.model_id = "biased";
  b.emotion_bias["scared"] = kDelta;
  const auto groups = bias_by_emotion(evaluate_all(corpus, generate_behavior(corpus, b)));

  std::map<std::string, MetricValue> rate;
  for (const auto& g : groups) rate[g.key.value] = find_metric(g.metrics, metric::kNonhumanToHuman);
  const MetricValue& happy = rate.at("happy");
  const MetricValue& scared = rate.at("scared");
  require(happy.defined() && scared.defined(), "per-emotion rate undefined");
  const std::size_t n = happy.denominator + scared.denominator;
  require(n >= 2000, "fewer than 2000 conditioned regions");
  const double recovered = *scared.value - *happy.value;
  const bool ok = std::abs(recovered - kDelta) <= 0.05;
  return {ok, "injected +" + fmt(kDelta, 2) + ", recovered " + fmt(recovered) + " (scared " + fmt(*scared.value) +
                  ", happy " + fmt(*happy.value) + ") over " + std::to_string(n) + " non-Human primaries"};
}

Outcome structural_orderings() {
  testing::Rng rng(424242);
  std::size_t inputs = 0;
  double worst_weighted = 0.0;
  double worst_row = 0.0;

  auto check_inputs = [&](const std::vector<ImageEvaluation>& evals, const std::string& where) {
    const auto global = core_metrics(evals);
    require(*global[0].value >= *global[1].value, "PPDR exceeds detection rate, " + where);
    for (const auto& part : {metrics_by_difficulty(evals), bias_by_emotion(evals), metrics_by_class(evals)}) {
      for (std::size_t k = 0; k < global.size(); ++k) {
        double num = 0, weighted = 0;
        std::size_t den = 0, excl = 0;
        for (const auto& g : part) {
          const MetricValue& m = g.metrics[k];
          num += m.numerator;
          den += m.denominator;
          excl += m.excluded;
          if (m.defined()) weighted += *m.value * double(m.denominator);
        }
        require(den == global[k].denominator && excl == global[k].excluded,
                "subgroup counts do not add up for " + global[k].name + ", " + where);
        require(global[k].defined() == (den > 0), "definedness inconsistent, " + where);
        if (global[k].name != metric::kRai) {
          require(num == global[k].numerator, "subgroup numerators do not add up, " + where);
        }
        if (global[k].defined()) {
          const double d = std::abs(weighted / double(den) - *global[k].value);
          worst_weighted = std::max(worst_weighted, d);
          require(d <= 1e-12, "count-weighted average differs by " + fmt_sci(d) + ", " + where);
        }
      }
    }
    ++inputs;
  };

  for (int trial = 0; trial < 1000; ++trial) {
    const Corpus corpus = testing::random_corpus(rng, 10, 5);
    const auto ea = evaluate_all(corpus, testing::random_records(rng, corpus, "a"));
    const auto eb = evaluate_all(corpus, testing::random_records(rng, corpus, "b"));
    check_inputs(ea, "random corpus " + std::to_string(trial));

    const auto a = confusion_matrix(ea);
    const auto b = confusion_matrix(eb);
    const DifferenceMap ab = difference_map(a, b);
    const DifferenceMap ba = difference_map(b, a);
    for (std::size_t y = 0; y < kNumClasses; ++y) {
      double row = 0.0;
      for (std::size_t p = 0; p < kNumClasses; ++p) {
        require(ab.delta[y][p] == -ba.delta[y][p], "difference map not antisymmetric");
        row += ab.delta[y][p];
      }
      worst_row = std::max(worst_row, std::abs(row));
      require(std::abs(row) <= 1e-6, "difference map row sum " + fmt_sci(row));
    }
  }
  for (Mechanism m : {Mechanism::Suppression, Mechanism::Abstention, Mechanism::Overactivation}) {
    SynthCorpusSpec spec;
    spec.n_images = 1000;
    spec.seed = 17;
    const Corpus corpus = generate_corpus(spec);
    BehaviorConfig b = BehaviorConfig::preset(m);
    b.seed = 18;
    check_inputs(evaluate_all(corpus, generate_behavior(corpus, b)), "synth " + std::string(to_string(m)));
  }
  return {true, std::to_string(inputs) + " inputs; max weighted-average diff " + fmt_sci(worst_weighted) +
                    ", max difference-map row sum " + fmt_sci(worst_row)};
}

#ifdef PAREIDO_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + PAREIDO_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

Outcome determinism() {
  // In-process: same inputs and manifest give identical bytes.
  SynthCorpusSpec spec;
  spec.n_images = 500;
  spec.seed = 31;
  const Corpus corpus = generate_corpus(spec);
  std::vector<PredictionRecord> preds;
  for (Mechanism m : {Mechanism::Suppression, Mechanism::Abstention, Mechanism::Overactivation}) {
    BehaviorConfig b = BehaviorConfig::preset(m);
    b.seed = 32;
    auto more = generate_behavior(corpus, b);
    preds.insert(preds.end(), more.begin(), more.end());
  }
  EvaluateOptions opts;
  opts.compare = {{"synth-abstention", "synth-overactivation"}};
  opts.dump_matches = true;
  RunManifest manifest;
  manifest.timestamp = "2026-10-15T00:00:00Z";
  const auto r1 = build_evaluation_report(corpus, preds, {}, opts, manifest);
  const auto r2 = build_evaluation_report(corpus, preds, {}, opts, manifest);
  require(report_to_json(r1) == report_to_json(r2), "in-process JSON reports differ");
  require(report_to_csv(r1) == report_to_csv(r2), "in-process CSV reports differ");
  std::string detail = "in-process JSON+CSV identical";

#ifdef PAREIDO_CLI_PATH
  // Across separate processes, from synthesis to report.
  const fs::path dir = fs::temp_directory_path() / "pareido_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const char* run : {"a", "b"}) {
    const std::string out = "\"" + (dir / run).string() + "\"";
    require(run_cli("synth --preset overactivation --n 400 --seed 5 --out " + out) == 0, "synth failed");
    for (const char* fmt_name : {"json", "csv"}) {
      require(run_cli("evaluate --corpus " + out + "/corpus.jsonl --pred " + out +
                      "/predictions.jsonl --timestamp 2026-10-15T00:00:00Z --dump-matches --format " + fmt_name +
                      " --out " + out + "/report." + fmt_name) == 0,
              "evaluate failed");
    }
  }
  for (const char* f : {"corpus.jsonl", "predictions.jsonl", "report.json", "report.csv"}) {
    require(read_file(dir / "a" / f) == read_file(dir / "b" / f), std::string("CLI output differs: ") + f);
  }
  fs::remove_all(dir);
  detail += "; two CLI runs byte-identical (corpus, predictions, JSON, CSV)";
#endif
  return {true, detail};
}

struct Criterion {
  std::string name;
  double time_limit_s;  // 0: none
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace pareido::acceptance

int main() {
  using namespace pareido::acceptance;
  const std::vector<Criterion> criteria = {
      {"metric-oracle-equivalence", 10.0, metric_oracle},
      {"matching-oracle-equivalence", 0.0, matching_oracle},
      {"entropy-bounds-and-identities", 0.0, entropy_identities},
      {"mechanism-separation", 30.0, mechanism_separation},
      {"emotion-bias-recovery", 0.0, emotion_bias_recovery},
      {"structural-orderings", 0.0, structural_orderings},
      {"determinism", 0.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const Failure& f) {
      o = {false, f.what};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::string timing = fmt(secs, 2) + " s";
    if (c.time_limit_s > 0) {
      timing += " (limit " + fmt(c.time_limit_s, 0) + " s)";
      if (secs >= c.time_limit_s) {
        o.pass = false;
        o.detail += "; over time limit";
      }
    }
    std::printf("%s  %-30s %s  [%s]\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
