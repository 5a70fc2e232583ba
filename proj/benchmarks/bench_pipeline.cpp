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

#include <benchmark/benchmark.h>

#include <map>

#include "pareido/corpus.hpp"
#include "pareido/evaluation.hpp"
#include "pareido/matching.hpp"
#include "pareido/metrics.hpp"
#include "pareido/report.hpp"
#include "pareido/synth.hpp"

namespace {

using namespace pareido;

Corpus make_corpus(std::size_t n) {
  SynthCorpusSpec spec;
  spec.n_images = n;
  spec.seed = 1;
  return generate_corpus(spec);
}

std::vector<PredictionRecord> make_predictions(const Corpus& corpus) {
  BehaviorConfig b = BehaviorConfig::preset(Mechanism::Overactivation);
  b.seed = 2;
  return generate_behavior(corpus, b);
}

void BM_MatchImage(benchmark::State& state) {
  const auto n_preds = static_cast<std::size_t>(state.range(0));
  ImageRecord img;
  img.image_id = "b";
  img.width = 1000;
  img.height = 1000;
  for (int r = 0; r < 5; ++r) {
    const double x = r * 150.0;
    img.regions.push_back({"r" + std::to_string(r), {x, x, x + 120, x + 120}, CoarseClass::Animal, r == 0});
  }
  SplitMix64 rng(3);
  std::vector<Box> preds;
  for (std::size_t i = 0; i < n_preds; ++i) {
    const double x = rng.uniform() * 800;
    const double y = rng.uniform() * 800;
    preds.push_back({x, y, x + 40 + rng.uniform() * 150, y + 40 + rng.uniform() * 150});
  }
  for (auto _ : state) benchmark::DoNotOptimize(match_image(img, preds));
}
BENCHMARK(BM_MatchImage)->Arg(4)->Arg(32)->Arg(256);

void BM_CoreMetrics(benchmark::State& state) {
  const Corpus corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  const auto preds = make_predictions(corpus);
  const auto evals = evaluate_models(corpus, preds).at(0).images;
  for (auto _ : state) benchmark::DoNotOptimize(core_metrics(evals));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CoreMetrics)->Arg(1000)->Arg(10000);

void BM_EvaluationReport(benchmark::State& state) {
  const Corpus corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  const auto preds = make_predictions(corpus);
  for (auto _ : state) {
    auto report = build_evaluation_report(corpus, preds, {}, EvaluateOptions{}, RunManifest{});
    benchmark::DoNotOptimize(report_to_json(report));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluationReport)->Arg(2000);

void BM_ParsePredictions(benchmark::State& state) {
  const Corpus corpus = make_corpus(2000);
  const std::string text = predictions_to_jsonl(make_predictions(corpus));
  for (auto _ : state) benchmark::DoNotOptimize(parse_predictions(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParsePredictions);

}  // namespace

BENCHMARK_MAIN();
