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

#include "pareido/gtbox.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pareido/error.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/text.hpp"

namespace pareido {

using ojson = nlohmann::ordered_json;

std::vector<CropSpec> emit_crop_specs(const Corpus& corpus, double padding_fraction) {
  if (!std::isfinite(padding_fraction) || padding_fraction < 0.0) {
    throw_validation("padding fraction must be finite and >= 0");
  }
  std::vector<CropSpec> out;
  for (const auto& img : corpus) {
    const double w = static_cast<double>(img.width);
    const double h = static_cast<double>(img.height);
    for (const auto& r : img.regions) {
      const double px = padding_fraction * r.box.width();
      const double py = padding_fraction * r.box.height();
      Box crop{std::max(0.0, r.box.x_min - px), std::max(0.0, r.box.y_min - py),
               std::min(w, r.box.x_max + px), std::min(h, r.box.y_max + py)};
      out.push_back({img.image_id, r.region_id, crop, padding_fraction});
    }
  }
  return out;
}

std::string crop_specs_to_jsonl(std::span<const CropSpec> specs) {
  std::string out;
  for (const auto& s : specs) {
    ojson j;
    j["image_id"] = s.image_id;
    j["region_id"] = s.region_id;
    j["crop"] = {s.crop.x_min, s.crop.y_min, s.crop.x_max, s.crop.y_max};
    j["padding"] = s.padding;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw_validation("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw_validation("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<CropSpec> parse_crop_specs(std::string_view text) {
  std::vector<CropSpec> out;
  for_each_line(text, [&](const nlohmann::json& j) {
    CropSpec s;
    s.image_id = j.at("image_id").get<std::string>();
    s.region_id = j.at("region_id").get<std::string>();
    const auto& c = j.at("crop");
    if (!c.is_array() || c.size() != 4) throw_validation("crop must have four coordinates");
    s.crop = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>(), c[3].get<double>()};
    s.padding = j.at("padding").get<double>();
    out.push_back(std::move(s));
  });
  return out;
}

std::string responses_to_jsonl(std::span<const GtBoxResponse> responses) {
  std::string out;
  for (const auto& r : responses) {
    ojson j;
    j["image_id"] = r.image_id;
    j["region_id"] = r.region_id;
    j["model_id"] = r.model_id;
    j["responded"] = r.responded;
    j["human_score"] = r.human_score ? ojson(*r.human_score) : ojson(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<GtBoxResponse> parse_responses(std::string_view text) {
  std::vector<GtBoxResponse> out;
  for_each_line(text, [&](const nlohmann::json& j) {
    GtBoxResponse r;
    r.image_id = j.at("image_id").get<std::string>();
    r.region_id = j.at("region_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    if (r.model_id.empty()) throw_validation("empty model_id");
    r.responded = j.at("responded").get<bool>();
    if (auto it = j.find("human_score"); it != j.end() && !it->is_null()) {
      r.human_score = it->get<double>();
    }
    if (r.responded != r.human_score.has_value()) {
      throw_validation("human_score must be present iff responded");
    }
    if (r.human_score && (!std::isfinite(*r.human_score) || *r.human_score < 0.0 || *r.human_score > 1.0)) {
      throw_validation("human_score outside [0, 1]");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<GtBoxResponse> read_responses(const std::filesystem::path& path) {
  return parse_responses(read_file(path));
}

std::vector<GtBoxReport> score_gtbox(std::span<const GtBoxResponse> responses, const Corpus& corpus) {
  std::unordered_map<std::string_view, const ImageRecord*> by_id;
  for (const auto& img : corpus) by_id.emplace(img.image_id, &img);

  std::map<std::string, std::vector<GtBoxResponse>> per_model;
  std::map<std::string, std::array<std::vector<GtBoxResponse>, kNumDifficulties>> per_difficulty;
  std::set<std::tuple<std::string_view, std::string_view, std::string_view>> seen;
  for (const auto& r : responses) {
    auto it = by_id.find(r.image_id);
    if (it == by_id.end()) {
      throw_validation("response references image '" + r.image_id + "' with no corpus difficulty");
    }
    const auto& regions = it->second->regions;
    const bool known_region = std::any_of(regions.begin(), regions.end(),
                                          [&](const auto& reg) { return reg.region_id == r.region_id; });
    if (!known_region) {
      throw_validation("response references unknown region '" + r.region_id + "' of image '" +
                       r.image_id + "'");
    }
    if (!seen.emplace(r.model_id, r.image_id, r.region_id).second) {
      throw_validation("duplicate response for model '" + r.model_id + "', image '" + r.image_id +
                       "', region '" + r.region_id + "'");
    }
    per_model[r.model_id].push_back(r);
    per_difficulty[r.model_id][index_of(it->second->difficulty)].push_back(r);
  }

  std::vector<GtBoxReport> out;
  for (const auto& [model_id, rs] : per_model) {
    GtBoxReport rep;
    rep.model_id = model_id;
    rep.metrics = response_metrics(rs);
    for (Difficulty d : kAllDifficulties) {
      const auto& subset = per_difficulty[model_id][index_of(d)];
      rep.by_difficulty.push_back(
          {{Dimension::Difficulty, std::string(to_string(d))}, subset.size(), response_metrics(subset)});
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace pareido
