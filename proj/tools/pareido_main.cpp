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

// pareido: command-line front end for corpus ingestion, evaluation, GT-box
// scoring and synthetic behavior generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pareido/corpus.hpp"
#include "pareido/error.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/gtbox.hpp"
#include "pareido/kv_config.hpp"
#include "pareido/predictions.hpp"
#include "pareido/report.hpp"
#include "pareido/synth.hpp"
#include "pareido/text.hpp"

namespace fs = std::filesystem;

namespace pareido {
namespace {

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot write '" + path + "'");
  out << content;
  if (!out) throw_io("failed writing '" + path + "'");
}

InputFingerprint fingerprint_input(const std::string& path) {
  return {fs::path(path).filename().string(), fingerprint_file(path)};
}

std::vector<PredictionRecord> load_predictions_strict(const std::string& path) {
  PredictionFile file = read_predictions(path);
  if (!file.errors.empty()) {
    for (const auto& e : file.errors) std::cerr << path << ":" << e.line << ": " << e.message << "\n";
    throw_validation(path + ": " + std::to_string(file.errors.size()) + " invalid prediction line(s)");
  }
  return std::move(file.records);
}

// --- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string table;
  std::string mapping;
  std::string out;
  std::string log;
};

int run_ingest(const IngestArgs& args) {
  const ColumnMapping mapping = ColumnMapping::load(args.mapping);
  const IngestResult result = ingest_corpus(args.table, mapping);
  write_output(args.out, corpus_to_jsonl(result.images));
  if (!args.log.empty()) write_output(args.log, cleaning_log_to_jsonl(result.log));
  std::cerr << "ingested " << result.images.size() << " image(s) from " << result.log.input_groups
            << " group(s); " << result.log.dropped_images() << " dropped, "
            << result.log.entries.size() << " cleaning log entr"
            << (result.log.entries.size() == 1 ? "y" : "ies") << "\n";
  return 0;
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string corpus;
  std::vector<std::string> predictions;
  std::vector<std::string> responses;
  double iou_threshold = kDefaultIouThreshold;
  bool dump_matches = false;
  std::string out;
  std::string format = "json";
  std::vector<std::string> compare;
  std::string timestamp;
};

int run_evaluate(const EvaluateArgs& args) {
  const Corpus corpus = read_corpus(args.corpus);

  RunManifest manifest;
  manifest.corpus_fingerprint = corpus_fingerprint(corpus);
  if (!args.timestamp.empty()) manifest.timestamp = args.timestamp;

  std::vector<PredictionRecord> records;
  for (const auto& path : args.predictions) {
    auto recs = load_predictions_strict(path);
    records.insert(records.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    manifest.prediction_fingerprints.push_back(fingerprint_input(path));
  }
  std::vector<GtBoxResponse> responses;
  for (const auto& path : args.responses) {
    auto rs = read_responses(path);
    responses.insert(responses.end(), rs.begin(), rs.end());
    manifest.response_fingerprints.push_back(fingerprint_input(path));
  }

  EvaluateOptions options;
  options.iou_threshold = args.iou_threshold;
  options.dump_matches = args.dump_matches;
  for (const auto& pair : args.compare) {
    const auto comma = pair.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == pair.size()) {
      throw Error(ErrorKind::Usage, "--compare expects MODEL_A,MODEL_B");
    }
    options.compare.emplace_back(pair.substr(0, comma), pair.substr(comma + 1));
  }

  const EvaluationReport report =
      build_evaluation_report(corpus, records, responses, options, std::move(manifest));
  for (const auto& m : report.models) {
    for (const auto& w : m.warnings) std::cerr << "warning: [" << m.model_id << "] " << w << "\n";
  }
  write_output(args.out, args.format == "csv" ? report_to_csv(report) : report_to_json(report));
  return 0;
}

// --- gtbox ----------------------------------------------------------------

struct EmitCropsArgs {
  std::string corpus;
  double padding = kDefaultPaddingFraction;
  std::string out;
};

int run_emit_crops(const EmitCropsArgs& args) {
  const Corpus corpus = read_corpus(args.corpus);
  write_output(args.out, crop_specs_to_jsonl(emit_crop_specs(corpus, args.padding)));
  return 0;
}

struct ScoreArgs {
  std::string corpus;
  std::vector<std::string> responses;
  double padding = kDefaultPaddingFraction;
  std::string out;
  std::string format = "json";
  std::string timestamp;
};

int run_score(const ScoreArgs& args) {
  const Corpus corpus = read_corpus(args.corpus);
  GtBoxScoreReport report;
  report.manifest.corpus_fingerprint = corpus_fingerprint(corpus);
  report.manifest.padding_fraction = args.padding;
  if (!args.timestamp.empty()) report.manifest.timestamp = args.timestamp;
  std::vector<GtBoxResponse> responses;
  for (const auto& path : args.responses) {
    auto rs = read_responses(path);
    responses.insert(responses.end(), rs.begin(), rs.end());
    report.manifest.response_fingerprints.push_back(fingerprint_input(path));
  }
  report.models = score_gtbox(responses, corpus);
  write_output(args.out, args.format == "csv" ? report_to_csv(report) : report_to_json(report));
  return 0;
}

// --- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string preset;
  std::string config;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string mode;
  std::string jitter;
  std::string model_id;
};

int run_synth(const SynthArgs& args) {
  BehaviorConfig behavior;
  if (!args.config.empty()) {
    const KvConfig cfg = KvConfig::load(args.config);
    behavior = BehaviorConfig::from_config(cfg);
    if (!cfg.contains("seed")) behavior.seed = args.seed;
  } else {
    behavior = BehaviorConfig::preset(*parse_mechanism(args.preset));
    behavior.seed = args.seed;
  }
  if (!args.mode.empty()) behavior.mode = *parse_prediction_mode(args.mode);
  if (!args.model_id.empty()) behavior.model_id = args.model_id;
  if (!args.jitter.empty()) {
    if (args.jitter == "localization-failure") {
      behavior.localization_noise = kLocalizationFailureJitter;
    } else if (auto v = parse_double(args.jitter)) {
      behavior.localization_noise = *v;
    } else {
      throw Error(ErrorKind::Usage, "--jitter expects a number or 'localization-failure'");
    }
  }

  SynthCorpusSpec spec;
  spec.n_images = args.n;
  spec.seed = args.seed;
  const Corpus corpus = generate_corpus(spec);
  const auto predictions = generate_behavior(corpus, behavior);

  const fs::path dir(args.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_io("cannot create '" + dir.string() + "': " + ec.message());
  write_output((dir / "corpus.jsonl").string(), corpus_to_jsonl(corpus));
  write_output((dir / "predictions.jsonl").string(), predictions_to_jsonl(predictions));
  std::cerr << "wrote " << corpus.size() << " image(s) and " << predictions.size()
            << " prediction record(s) for model '" << behavior.model_id << "' to " << dir.string() << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Pareidolia diagnostics: matching, detection, uncertainty and bias metrics"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Normalize an annotation table into a corpus file");
  ingest_cmd->add_option("--table", ingest.table, "CSV/TSV/JSON annotation table")->required();
  ingest_cmd->add_option("--mapping", ingest.mapping, "Column mapping config")->required();
  ingest_cmd->add_option("--out", ingest.out, "Corpus JSONL output (default: stdout)");
  ingest_cmd->add_option("--log", ingest.log, "Cleaning log JSONL output");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Compute metrics for one or more prediction files");
  eval_cmd->add_option("--corpus", eval.corpus, "Normalized corpus JSONL")->required();
  eval_cmd->add_option("--pred", eval.predictions, "Prediction JSONL (repeatable)")->required();
  eval_cmd->add_option("--responses", eval.responses, "GT-box response JSONL (repeatable)");
  eval_cmd->add_option("--iou-threshold", eval.iou_threshold, "IoU threshold for candidate pairs")
      ->check(CLI::Range(0.0, 1.0).description("(0,1]"))
      ->check([](const std::string& s) { return parse_double(s).value_or(0.0) > 0.0 ? "" : "must be > 0"; });
  eval_cmd->add_flag("--dump-matches", eval.dump_matches, "Include per-image match results");
  eval_cmd->add_option("--out", eval.out, "Report output (default: stdout)");
  eval_cmd->add_option("--format", eval.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  eval_cmd->add_option("--compare", eval.compare, "MODEL_A,MODEL_B difference map (repeatable)");
  eval_cmd->add_option("--timestamp", eval.timestamp, "Timestamp recorded in the manifest");

  auto* gtbox_cmd = app.add_subcommand("gtbox", "GT-box-controlled evaluation");
  gtbox_cmd->require_subcommand(1);
  EmitCropsArgs crops;
  auto* crops_cmd = gtbox_cmd->add_subcommand("emit-crops", "Emit padded crop specs for every region");
  crops_cmd->add_option("--corpus", crops.corpus, "Normalized corpus JSONL")->required();
  crops_cmd->add_option("--padding", crops.padding, "Padding fraction per side")
      ->check(CLI::NonNegativeNumber);
  crops_cmd->add_option("--out", crops.out, "Crop spec JSONL (default: stdout)");
  ScoreArgs score;
  auto* score_cmd = gtbox_cmd->add_subcommand("score", "Score GT-box responses");
  score_cmd->add_option("--corpus", score.corpus, "Normalized corpus JSONL")->required();
  score_cmd->add_option("--responses", score.responses, "GT-box response JSONL (repeatable)")->required();
  score_cmd->add_option("--padding", score.padding, "Padding fraction the crops were emitted with")
      ->check(CLI::NonNegativeNumber);
  score_cmd->add_option("--out", score.out, "Report output (default: stdout)");
  score_cmd->add_option("--format", score.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  score_cmd->add_option("--timestamp", score.timestamp, "Timestamp recorded in the manifest");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus and model behavior");
  auto* preset_opt = synth_cmd->add_option("--preset", synth.preset, "overactivation|abstention|suppression")
                         ->check(CLI::IsMember({"overactivation", "abstention", "suppression"}));
  auto* config_opt = synth_cmd->add_option("--config", synth.config, "Behavior config file");
  preset_opt->excludes(config_opt);
  synth_cmd->add_option("--n", synth.n, "Number of images")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed, "Seed for corpus and behavior");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--mode", synth.mode, "full_image or box_level")
      ->check(CLI::IsMember({"full_image", "box_level"}));
  synth_cmd->add_option("--jitter", synth.jitter, "Box jitter fraction or 'localization-failure'");
  synth_cmd->add_option("--model-id", synth.model_id, "Override the emitted model_id");

  try {
    app.parse(argc, argv);
    if (*synth_cmd && synth.preset.empty() && synth.config.empty()) {
      throw CLI::RequiredError("synth requires --preset or --config");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code_for(ErrorKind::Usage);
  }

  if (*ingest_cmd) return run_ingest(ingest);
  if (*eval_cmd) return run_evaluate(eval);
  if (*crops_cmd) return run_emit_crops(crops);
  if (*score_cmd) return run_score(score);
  if (*synth_cmd) return run_synth(synth);
  return exit_code_for(ErrorKind::Usage);
}

}  // namespace
}  // namespace pareido

int main(int argc, char** argv) {
  try {
    return pareido::run(argc, argv);
  } catch (const pareido::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pareido::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return pareido::exit_code_for(pareido::ErrorKind::Internal);
  }
}
