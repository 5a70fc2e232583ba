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

#include "pareido/predictions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "pareido/error.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/text.hpp"

namespace pareido {

using ojson = nlohmann::ordered_json;

ClassDistribution::ClassDistribution(const Values& values) : values_(values) {
  if (auto problem = check(values); !problem.empty()) throw_validation(problem);
}

ClassDistribution ClassDistribution::one_hot(CoarseClass c) {
  Values v{};
  v[index_of(c)] = 1.0;
  return ClassDistribution(v);
}

ClassDistribution ClassDistribution::uniform() {
  Values v;
  v.fill(1.0 / static_cast<double>(kNumClasses));
  return ClassDistribution(v);
}

std::string ClassDistribution::check(const Values& values) {
  double sum = 0.0;
  for (double p : values) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) return "probability outside [0, 1]";
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionSumTolerance) {
    return "distribution sums to " + format_double(sum) + ", expected 1";
  }
  return {};
}

std::string_view to_string(PredictionMode m) {
  return m == PredictionMode::FullImage ? "full_image" : "box_level";
}

std::optional<PredictionMode> parse_prediction_mode(std::string_view text) {
  if (text == "full_image") return PredictionMode::FullImage;
  if (text == "box_level") return PredictionMode::BoxLevel;
  return std::nullopt;
}

std::string PredictionRecord::validate() const {
  if (image_id.empty()) return "empty image_id";
  if (model_id.empty()) return "empty model_id";
  if (mode == PredictionMode::FullImage) {
    if (!region_preds.empty()) return "full_image record carries region_preds";
    for (const auto& b : boxes) {
      if (!b.box.valid()) return "invalid predicted box";
      if (b.raw_score && (!std::isfinite(*b.raw_score) || *b.raw_score < 0.0 || *b.raw_score > 1.0)) {
        return "raw_score outside [0, 1]";
      }
    }
  } else {
    if (!boxes.empty()) return "box_level record carries boxes";
    if (region_preds.empty()) return "box_level record has no region_preds";
    std::set<std::string_view> ids;
    for (const auto& rp : region_preds) {
      if (rp.region_id.empty()) return "empty region_id in region_preds";
      if (!ids.insert(rp.region_id).second) return "duplicate region_id " + rp.region_id;
    }
  }
  return {};
}

namespace {

ClassDistribution dist_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != kNumClasses) throw_validation("dist must have five entries");
  ClassDistribution::Values v{};
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (!j[i].is_number()) throw_validation("dist entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return ClassDistribution(v);
}

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw_validation("box must have four coordinates");
  for (const auto& e : j) {
    if (!e.is_number()) throw_validation("box coordinates must be numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

ojson dist_to_json(const ClassDistribution& d) {
  ojson arr = ojson::array();
  for (double p : d.values()) arr.push_back(p);
  return arr;
}

}  // namespace

PredictionRecord parse_prediction_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw_validation(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw_validation("record must be a JSON object");

  try {
    PredictionRecord rec;
    rec.image_id = j.at("image_id").get<std::string>();
    rec.model_id = j.at("model_id").get<std::string>();
    const auto mode_text = j.at("mode").get<std::string>();
    auto mode = parse_prediction_mode(mode_text);
    if (!mode) throw_validation("unknown mode '" + mode_text + "'");
    rec.mode = *mode;

    if (auto it = j.find("boxes"); it != j.end() && !it->is_null()) {
      for (const auto& jb : *it) {
        std::optional<double> raw;
        if (auto rs = jb.find("raw_score"); rs != jb.end() && !rs->is_null()) raw = rs->get<double>();
        rec.boxes.push_back({box_from_json(jb.at("box")), dist_from_json(jb.at("dist")), raw});
      }
    }
    if (auto it = j.find("region_preds"); it != j.end() && !it->is_null()) {
      for (const auto& jr : *it) {
        rec.region_preds.push_back({jr.at("region_id").get<std::string>(), dist_from_json(jr.at("dist"))});
      }
    }
    if (auto problem = rec.validate(); !problem.empty()) throw_validation(problem);
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw_validation(std::string("bad field: ") + e.what());
  }
}

std::string prediction_to_json_line(const PredictionRecord& record) {
  ojson j;
  j["image_id"] = record.image_id;
  j["model_id"] = record.model_id;
  j["mode"] = to_string(record.mode);
  ojson boxes = ojson::array();
  for (const auto& b : record.boxes) {
    ojson jb;
    jb["box"] = {b.box.x_min, b.box.y_min, b.box.x_max, b.box.y_max};
    jb["dist"] = dist_to_json(b.distribution);
    jb["raw_score"] = b.raw_score ? ojson(*b.raw_score) : ojson(nullptr);
    boxes.push_back(std::move(jb));
  }
  j["boxes"] = std::move(boxes);
  ojson preds = ojson::array();
  for (const auto& rp : record.region_preds) {
    ojson jr;
    jr["region_id"] = rp.region_id;
    jr["dist"] = dist_to_json(rp.distribution);
    preds.push_back(std::move(jr));
  }
  j["region_preds"] = std::move(preds);
  return j.dump();
}

PredictionFile parse_predictions(std::string_view text) {
  PredictionFile out;
  std::vector<std::pair<std::size_t, PredictionRecord>> numbered;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      numbered.emplace_back(line_no, parse_prediction_line(line));
    } catch (const Error& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  std::stable_sort(numbered.begin(), numbered.end(), [](const auto& a, const auto& b) {
    if (a.second.image_id != b.second.image_id) return a.second.image_id < b.second.image_id;
    return a.first < b.first;
  });
  out.records.reserve(numbered.size());
  for (auto& [_, rec] : numbered) out.records.push_back(std::move(rec));
  return out;
}

PredictionFile read_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += prediction_to_json_line(r);
    out += '\n';
  }
  return out;
}

std::string_view to_string(ScoreConversion c) {
  return c == ScoreConversion::ResidualToOther ? "residual_to_other" : "one_hot";
}

std::optional<ScoreConversion> parse_score_conversion(std::string_view text) {
  if (text == "residual_to_other") return ScoreConversion::ResidualToOther;
  if (text == "one_hot") return ScoreConversion::OneHot;
  return std::nullopt;
}

ClassDistribution score_to_distribution(CoarseClass mapped_class, double score,
                                        ScoreConversion conversion) {
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw_validation("score " + format_double(score) + " outside [0, 1]");
  }
  if (conversion == ScoreConversion::OneHot || mapped_class == CoarseClass::Other) {
    return ClassDistribution::one_hot(mapped_class);
  }
  ClassDistribution::Values v{};
  v[index_of(mapped_class)] = score;
  v[index_of(CoarseClass::Other)] = 1.0 - score;
  return ClassDistribution(v);
}

}  // namespace pareido
