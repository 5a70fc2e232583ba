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

#include "pareido/report.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pareido/error.hpp"
#include "pareido/evaluation.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/text.hpp"

#ifndef PAREIDO_VERSION
#define PAREIDO_VERSION "0.0.0"
#endif

namespace pareido {

using ojson = nlohmann::ordered_json;

std::string_view tool_version() { return PAREIDO_VERSION; }

std::string RunManifest::config_hash() const {
  Fnv1a h;
  auto field = [&](std::string_view s) { h.update(s).update(std::string_view("\x1f", 1)); };
  field(tool_version);
  field(corpus_fingerprint);
  for (const auto& f : prediction_fingerprints) {
    field(f.file);
    field(f.hash);
  }
  field("responses");
  for (const auto& f : response_fingerprints) {
    field(f.file);
    field(f.hash);
  }
  field(format_double(iou_threshold));
  field(format_double(padding_fraction));
  field(entropy_base);
  field(matching_tie_break);
  field(argmax_tie_break);
  return h.hex();
}

namespace {

ojson value_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson manifest_json(const RunManifest& m) {
  auto fps = [](const std::vector<InputFingerprint>& list) {
    ojson arr = ojson::array();
    for (const auto& f : list) arr.push_back({{"file", f.file}, {"hash", f.hash}});
    return arr;
  };
  ojson j;
  j["tool_version"] = m.tool_version;
  j["corpus_fingerprint"] = m.corpus_fingerprint;
  j["prediction_fingerprints"] = fps(m.prediction_fingerprints);
  j["response_fingerprints"] = fps(m.response_fingerprints);
  j["iou_threshold"] = m.iou_threshold;
  j["padding_fraction"] = m.padding_fraction;
  j["entropy_base"] = m.entropy_base;
  j["tie_break"] = {{"matching", m.matching_tie_break}, {"argmax", m.argmax_tie_break}};
  j["timestamp"] = m.timestamp ? ojson(*m.timestamp) : ojson(nullptr);
  j["config_hash"] = m.config_hash();
  return j;
}

ojson metric_json(const MetricValue& m) {
  ojson j;
  j["name"] = m.name;
  j["value"] = value_json(m.value);
  j["numerator"] = m.numerator;
  j["denominator"] = m.denominator;
  j["excluded"] = m.excluded;
  return j;
}

ojson metrics_json(const std::vector<MetricValue>& ms) {
  ojson arr = ojson::array();
  for (const auto& m : ms) arr.push_back(metric_json(m));
  return arr;
}

ojson subgroups_json(const std::vector<SubgroupReport>& subs) {
  ojson arr = ojson::array();
  for (const auto& s : subs) {
    ojson j;
    j["subgroup"] = {{"dimension", to_string(s.key.dimension)}, {"value", s.key.value}, {"n", s.n}};
    j["metrics"] = metrics_json(s.metrics);
    arr.push_back(std::move(j));
  }
  return arr;
}

ojson matrix_json(const Matrix5& m, const std::array<bool, kNumClasses>& row_ok) {
  ojson rows = ojson::array();
  for (std::size_t y = 0; y < kNumClasses; ++y) {
    ojson row = ojson::array();
    for (std::size_t p = 0; p < kNumClasses; ++p) row.push_back(row_ok[y] ? ojson(m[y][p]) : ojson(nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::array<bool, kNumClasses> negate(const std::array<bool, kNumClasses>& flags) {
  std::array<bool, kNumClasses> out{};
  for (std::size_t i = 0; i < kNumClasses; ++i) out[i] = !flags[i];
  return out;
}

ojson class_names_json() {
  ojson arr = ojson::array();
  for (CoarseClass c : kAllClasses) arr.push_back(to_string(c));
  return arr;
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

constexpr std::string_view kCsvHeader =
    "model_id,dimension,subgroup,n,metric,value,numerator,denominator,excluded\n";

void csv_metric_rows(std::string& out, std::string_view model, std::string_view dimension,
                     std::string_view subgroup, std::size_t n, const std::vector<MetricValue>& ms) {
  for (const auto& m : ms) {
    out += csv_escape(model);
    out += ',';
    out += csv_escape(dimension);
    out += ',';
    out += csv_escape(subgroup);
    out += ',';
    out += std::to_string(n);
    out += ',';
    out += m.name;
    out += ',';
    if (m.value) out += format_double(*m.value);
    out += ',';
    out += format_double(m.numerator);
    out += ',';
    out += std::to_string(m.denominator);
    out += ',';
    out += std::to_string(m.excluded);
    out += '\n';
  }
}

}  // namespace

std::string match_result_to_json(const MatchResult& match) {
  ojson j;
  j["image_id"] = match.image_id;
  j["primary_region_id"] = match.regions.at(match.primary_index).region_id;
  j["any_prediction_on_primary"] = match.any_prediction_on_primary;
  j["primary_matched"] = match.primary_matched();
  ojson regions = ojson::array();
  for (const auto& r : match.regions) {
    ojson jr;
    jr["region_id"] = r.region_id;
    jr["matched"] = r.matched;
    jr["matched_box_index"] = r.matched_box_index ? ojson(*r.matched_box_index) : ojson(nullptr);
    jr["iou"] = r.iou;
    jr["via_center_only"] = r.via_center_only;
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);
  j["unmatched_prediction_indices"] = match.unmatched_prediction_indices;
  return j.dump();
}

EvaluationReport build_evaluation_report(const Corpus& corpus, std::span<const PredictionRecord> predictions,
                                         std::span<const GtBoxResponse> responses,
                                         const EvaluateOptions& options, RunManifest manifest) {
  manifest.iou_threshold = options.iou_threshold;
  if (manifest.corpus_fingerprint.empty()) manifest.corpus_fingerprint = corpus_fingerprint(corpus);

  EvaluationReport report;
  report.manifest = std::move(manifest);

  // Validates response references against the corpus as a side effect.
  (void)score_gtbox(responses, corpus);
  std::map<std::string, std::vector<GtBoxResponse>, std::less<>> responses_by_model;
  for (const auto& r : responses) responses_by_model[r.model_id].push_back(r);

  std::unordered_map<std::string_view, const ImageRecord*> image_by_id;
  for (const auto& img : corpus) image_by_id.emplace(img.image_id, &img);

  auto evaluations = evaluate_models(corpus, predictions, options.iou_threshold);
  for (auto& me : evaluations) {
    ModelReport mr;
    mr.model_id = me.model_id;
    mr.n_images = me.images.size();

    std::vector<GtBoxResponse> model_responses;
    if (auto it = responses_by_model.find(me.model_id); it != responses_by_model.end()) {
      model_responses = it->second;
    }
    auto responses_where = [&](const SubgroupKey& key) {
      std::vector<GtBoxResponse> subset;
      for (const auto& r : model_responses) {
        auto found = image_by_id.find(r.image_id);
        if (found == image_by_id.end()) continue;
        const ImageRecord* img = found->second;
        std::string value;
        switch (key.dimension) {
          case Dimension::Difficulty: value = to_string(img->difficulty); break;
          case Dimension::Emotion: value = img->emotion; break;
          case Dimension::GtClass: value = to_string(img->image_label); break;
        }
        if (value == key.value) subset.push_back(r);
      }
      return subset;
    };

    mr.metrics = core_metrics(me.images);
    for (auto& m : response_metrics(model_responses)) mr.metrics.push_back(std::move(m));
    mr.subgroups = all_subgroups(me.images);
    if (!model_responses.empty()) {
      for (auto& sub : mr.subgroups) {
        for (auto& m : response_metrics(responses_where(sub.key))) sub.metrics.push_back(std::move(m));
      }
    } else {
      for (auto& sub : mr.subgroups) {
        for (auto& m : response_metrics({})) sub.metrics.push_back(std::move(m));
      }
    }

    mr.confusion = confusion_matrix(me.images);
    mr.confusion.corpus_fingerprint = report.manifest.corpus_fingerprint;
    mr.confusion.iou_threshold = options.iou_threshold;
    for (const auto& u : me.unknown_images) {
      mr.warnings.push_back("image_id '" + u + "' in predictions is absent from the corpus");
    }
    if (options.dump_matches) {
      std::vector<MatchResult> matches;
      matches.reserve(me.images.size());
      for (const auto& ev : me.images) matches.push_back(ev.match);
      mr.matches = std::move(matches);
    }
    report.models.push_back(std::move(mr));
  }

  auto find_model = [&](const std::string& id) -> const ModelReport& {
    for (const auto& m : report.models) {
      if (m.model_id == id) return m;
    }
    throw_validation("--compare names unknown model '" + id + "'");
  };
  for (const auto& [a, b] : options.compare) {
    report.comparisons.push_back({a, b, difference_map(find_model(a).confusion, find_model(b).confusion)});
  }
  return report;
}

std::string report_to_json(const EvaluationReport& report) {
  ojson j;
  j["manifest"] = manifest_json(report.manifest);
  ojson models = ojson::object();
  for (const auto& m : report.models) {
    ojson jm;
    jm["n_images"] = m.n_images;
    jm["metrics"] = metrics_json(m.metrics);
    jm["subgroups"] = subgroups_json(m.subgroups);
    jm["confusion_classes"] = class_names_json();
    jm["confusion"] = matrix_json(m.confusion.rates, negate(m.confusion.row_empty));
    ojson counts = ojson::array();
    for (const auto& row : m.confusion.counts) counts.push_back(row);
    jm["confusion_counts"] = std::move(counts);
    jm["warnings"] = m.warnings;
    if (m.matches) {
      ojson arr = ojson::array();
      for (const auto& match : *m.matches) arr.push_back(ojson::parse(match_result_to_json(match)));
      jm["matches"] = std::move(arr);
    }
    models[m.model_id] = std::move(jm);
  }
  j["models"] = std::move(models);
  ojson comps = ojson::array();
  for (const auto& c : report.comparisons) {
    ojson jc;
    jc["a"] = c.a;
    jc["b"] = c.b;
    jc["difference"] = matrix_json(c.difference.delta, c.difference.row_defined);
    comps.push_back(std::move(jc));
  }
  j["comparisons"] = std::move(comps);
  return j.dump(2) + "\n";
}

std::string report_to_csv(const EvaluationReport& report) {
  std::string out(kCsvHeader);
  for (const auto& m : report.models) {
    csv_metric_rows(out, m.model_id, "all", "all", m.n_images, m.metrics);
    for (const auto& s : m.subgroups) {
      csv_metric_rows(out, m.model_id, to_string(s.key.dimension), s.key.value, s.n, s.metrics);
    }
    // Confusion rows: subgroup = ground-truth class, metric = predicted class.
    for (std::size_t y = 0; y < kNumClasses; ++y) {
      std::size_t total = 0;
      for (std::size_t c : m.confusion.counts[y]) total += c;
      std::vector<MetricValue> cells;
      for (std::size_t p = 0; p < kNumClasses; ++p) {
        MetricValue cell;
        cell.name = "confusion:" + std::string(to_string(kAllClasses[p]));
        if (!m.confusion.row_empty[y]) cell.value = m.confusion.rates[y][p];
        cell.numerator = static_cast<double>(m.confusion.counts[y][p]);
        cell.denominator = total;
        cells.push_back(std::move(cell));
      }
      csv_metric_rows(out, m.model_id, "confusion", to_string(kAllClasses[y]), total, cells);
    }
  }
  return out;
}

std::string report_to_json(const GtBoxScoreReport& report) {
  ojson j;
  j["manifest"] = manifest_json(report.manifest);
  ojson models = ojson::object();
  for (const auto& m : report.models) {
    ojson jm;
    jm["metrics"] = metrics_json(m.metrics);
    jm["subgroups"] = subgroups_json(m.by_difficulty);
    models[m.model_id] = std::move(jm);
  }
  j["models"] = std::move(models);
  j["comparisons"] = ojson::array();
  return j.dump(2) + "\n";
}

std::string report_to_csv(const GtBoxScoreReport& report) {
  std::string out(kCsvHeader);
  for (const auto& m : report.models) {
    std::size_t n = 0;
    for (const auto& s : m.by_difficulty) n += s.n;
    csv_metric_rows(out, m.model_id, "all", "all", n, m.metrics);
    for (const auto& s : m.by_difficulty) {
      csv_metric_rows(out, m.model_id, to_string(s.key.dimension), s.key.value, s.n, s.metrics);
    }
  }
  return out;
}

}  // namespace pareido
