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

#include "pareido/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pareido/error.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/text.hpp"

namespace pareido {

using ojson = nlohmann::ordered_json;

LabelMap LabelMap::identity(bool default_to_other) {
  LabelMap m;
  m.default_to_other = default_to_other;
  for (CoarseClass c : kAllClasses) m.table.emplace(to_lower(to_string(c)), c);
  return m;
}

LabelMap LabelMap::from_config(const KvConfig& cfg) {
  LabelMap m = identity(true);
  for (const auto& [key, value] : cfg.entries()) {
    if (key == "default") {
      const std::string v = to_lower(value);
      if (v == "other") {
        m.default_to_other = true;
      } else if (v == "none") {
        m.default_to_other = false;
      } else {
        throw_validation(cfg.source() + ": default must be 'other' or 'none'");
      }
      continue;
    }
    auto coarse = parse_coarse_class(value);
    if (!coarse) throw_validation(cfg.source() + ": '" + value + "' is not a coarse class");
    m.table[key] = *coarse;
  }
  return m;
}

LabelMap LabelMap::load(const std::filesystem::path& path) { return from_config(KvConfig::load(path)); }

CoarseClass consolidate_label(std::string_view fine_label, const LabelMap& map) {
  const std::string key = to_lower(trim(fine_label));
  if (auto it = map.table.find(key); it != map.table.end()) return it->second;
  if (map.default_to_other) return CoarseClass::Other;
  throw_validation("unmapped label '" + std::string(fine_label) + "'");
}

ColumnMapping ColumnMapping::from_config(const KvConfig& cfg) {
  ColumnMapping m;
  m.image_id = cfg.require("image_id");
  m.region_id = cfg.get("region_id").value_or("");
  const std::string fmt = to_lower(cfg.get("box_format").value_or("xyxy"));
  if (fmt == "xyxy") {
    m.box_format = BoxFormat::Xyxy;
    m.box = {cfg.require("x_min"), cfg.require("y_min"), cfg.require("x_max"), cfg.require("y_max")};
  } else if (fmt == "xywh") {
    m.box_format = BoxFormat::Xywh;
    m.box = {cfg.require("x"), cfg.require("y"), cfg.require("w"), cfg.require("h")};
  } else {
    throw_validation(cfg.source() + ": box_format must be xyxy or xywh");
  }
  m.width = cfg.require("width");
  m.height = cfg.require("height");
  m.label = cfg.require("label");
  m.image_label = cfg.get("image_label").value_or("");
  m.difficulty = cfg.require("difficulty");
  m.emotion = cfg.get("emotion").value_or("");
  m.primary = cfg.require("primary");
  m.corrupt = cfg.get("corrupt").value_or("");

  if (auto path = cfg.get("label_map")) {
    std::filesystem::path p(*path);
    if (p.is_relative()) p = cfg.base_dir() / p;
    m.labels = LabelMap::load(p);
  }
  if (auto def = cfg.get("label_default")) {
    const std::string v = to_lower(*def);
    if (v != "other" && v != "none") {
      throw_validation(cfg.source() + ": label_default must be 'other' or 'none'");
    }
    m.labels.default_to_other = v == "other";
  }
  return m;
}

ColumnMapping ColumnMapping::load(const std::filesystem::path& path) {
  return from_config(KvConfig::load(path));
}

std::vector<std::string> ColumnMapping::required_columns() const {
  std::vector<std::string> cols = {image_id, box[0], box[1], box[2], box[3],
                                   width,    height, label,  difficulty, primary};
  return cols;
}

std::vector<std::string> ColumnMapping::optional_columns() const {
  std::vector<std::string> cols;
  for (const std::string& c : {region_id, image_label, emotion, corrupt}) {
    if (!c.empty()) cols.push_back(c);
  }
  return cols;
}

std::string_view to_string(CleaningReason r) {
  switch (r) {
    case CleaningReason::CorruptImage: return "corrupt-image";
    case CleaningReason::MissingBox: return "missing-box";
    case CleaningReason::NoPrimary: return "no-primary";
    case CleaningReason::OutOfBoundsBox: return "out-of-bounds-box";
    case CleaningReason::DuplicateId: return "duplicate-id";
    case CleaningReason::NoPrimaryConflict: return "no-primary-conflict";
    case CleaningReason::InvalidMetadata: return "invalid-metadata";
  }
  return "invalid-metadata";
}

std::string_view to_string(CleaningAction a) {
  switch (a) {
    case CleaningAction::DroppedRow: return "dropped-row";
    case CleaningAction::DroppedImage: return "dropped-image";
    case CleaningAction::Repaired: return "repaired";
  }
  return "dropped-row";
}

std::size_t CleaningLog::dropped_images() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
    return e.action == CleaningAction::DroppedImage;
  }));
}

std::size_t CleaningLog::count(CleaningReason reason) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [&](const auto& e) { return e.reason == reason; }));
}

// ---------------------------------------------------------------------------
// Table readers

std::ptrdiff_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

Table parse_delimited(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A line holding a single empty field is a blank line.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (ch == delimiter) {
      end_field();
    } else if (ch == '\n') {
      end_record();
    } else if (ch == '\r') {
      // swallowed; CRLF line endings
    } else {
      field.push_back(ch);
      field_started = true;
    }
  }
  if (in_quotes) throw_validation("unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  Table t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (auto& h : t.header) h = std::string(trim(h));
  t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  for (auto& row : t.rows) row.resize(t.header.size());
  return t;
}

Table parse_json_table(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw_validation(std::string("malformed JSON table: ") + e.what());
  }
  if (!doc.is_array()) throw_validation("JSON table must be an array of objects");

  Table t;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& obj : doc) {
    if (!obj.is_object()) throw_validation("JSON table must be an array of objects");
    for (const auto& [key, _] : obj.items()) {
      if (index.emplace(key, t.header.size()).second) t.header.push_back(key);
    }
  }
  for (const auto& obj : doc) {
    std::vector<std::string> row(t.header.size());
    for (const auto& [key, value] : obj.items()) {
      std::string cell;
      if (value.is_string()) {
        cell = value.get<std::string>();
      } else if (!value.is_null()) {
        cell = value.dump();
      }
      row[index.at(key)] = std::move(cell);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table load_table(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::string ext = to_lower(path.extension().string());
  if (ext == ".json") return parse_json_table(text);
  if (ext == ".tsv" || ext == ".tab") return parse_delimited(text, '\t');
  return parse_delimited(text, ',');
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

struct Columns {
  std::ptrdiff_t image_id = -1;
  std::ptrdiff_t region_id = -1;
  std::array<std::ptrdiff_t, 4> box{-1, -1, -1, -1};
  std::ptrdiff_t width = -1;
  std::ptrdiff_t height = -1;
  std::ptrdiff_t label = -1;
  std::ptrdiff_t image_label = -1;
  std::ptrdiff_t difficulty = -1;
  std::ptrdiff_t emotion = -1;
  std::ptrdiff_t primary = -1;
  std::ptrdiff_t corrupt = -1;
};

Columns resolve_columns(const Table& table, const ColumnMapping& m) {
  auto need = [&](const std::string& name) {
    const auto idx = table.column(name);
    if (idx < 0) throw_validation("column mapping names missing column '" + name + "'");
    return idx;
  };
  auto maybe = [&](const std::string& name) -> std::ptrdiff_t {
    return name.empty() ? -1 : need(name);
  };
  Columns c;
  c.image_id = need(m.image_id);
  c.region_id = maybe(m.region_id);
  for (std::size_t i = 0; i < 4; ++i) c.box[i] = need(m.box[i]);
  c.width = need(m.width);
  c.height = need(m.height);
  c.label = need(m.label);
  c.image_label = maybe(m.image_label);
  c.difficulty = need(m.difficulty);
  c.emotion = maybe(m.emotion);
  c.primary = need(m.primary);
  c.corrupt = maybe(m.corrupt);
  return c;
}

std::string_view cell(const std::vector<std::string>& row, std::ptrdiff_t idx) {
  if (idx < 0 || static_cast<std::size_t>(idx) >= row.size()) return {};
  return trim(row[static_cast<std::size_t>(idx)]);
}

std::optional<std::int64_t> parse_dimension(std::string_view s) {
  auto v = parse_double(s);
  if (!v || !std::isfinite(*v) || *v <= 0.0 || *v != std::floor(*v) || *v > 1e9) {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(*v);
}

struct Group {
  std::string image_id;
  std::vector<std::size_t> rows;  // indices into table.rows, in row order
};

}  // namespace

IngestResult ingest_table(const Table& table, const ColumnMapping& mapping) {
  const Columns cols = resolve_columns(table, mapping);
  IngestResult result;
  CleaningLog& log = result.log;
  log.input_rows = table.rows.size();

  std::vector<Group> groups;
  std::unordered_map<std::string, std::size_t> group_index;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string id(cell(table.rows[r], cols.image_id));
    if (id.empty()) {
      log.entries.push_back({r + 1, "", "", CleaningReason::InvalidMetadata,
                             CleaningAction::DroppedRow, "empty image id"});
      continue;
    }
    auto [it, inserted] = group_index.emplace(id, groups.size());
    if (inserted) groups.push_back({id, {}});
    groups[it->second].rows.push_back(r);
  }
  log.input_groups = groups.size();

  for (const Group& g : groups) {
    const auto& first = table.rows[g.rows.front()];
    auto drop_image = [&](CleaningReason reason, std::string detail) {
      log.entries.push_back({0, g.image_id, "", reason, CleaningAction::DroppedImage, std::move(detail)});
    };

    if (cols.corrupt >= 0) {
      const auto flag = cell(first, cols.corrupt);
      if (!flag.empty() && parse_bool(flag).value_or(true)) {
        drop_image(CleaningReason::CorruptImage, "marked corrupt");
        continue;
      }
    }
    const auto width = parse_dimension(cell(first, cols.width));
    const auto height = parse_dimension(cell(first, cols.height));
    if (!width || !height) {
      drop_image(CleaningReason::CorruptImage, "missing or invalid image dimensions");
      continue;
    }
    const auto difficulty = parse_difficulty(cell(first, cols.difficulty));
    if (!difficulty) {
      drop_image(CleaningReason::InvalidMetadata,
                 "unknown difficulty '" + std::string(cell(first, cols.difficulty)) + "'");
      continue;
    }

    ImageRecord img;
    img.image_id = g.image_id;
    img.width = *width;
    img.height = *height;
    img.difficulty = *difficulty;
    img.emotion = canonicalize_emotion(cell(first, cols.emotion));

    std::set<std::string> seen_ids;
    std::vector<std::size_t> region_rows;
    std::size_t ordinal = 0;
    for (std::size_t r : g.rows) {
      const auto& row = table.rows[r];
      ++ordinal;
      std::string rid(cell(row, cols.region_id));
      if (rid.empty()) rid = "r" + std::to_string(ordinal);
      auto drop_row = [&](CleaningReason reason, std::string detail) {
        log.entries.push_back({r + 1, g.image_id, rid, reason, CleaningAction::DroppedRow, std::move(detail)});
      };

      if (seen_ids.count(rid)) {
        drop_row(CleaningReason::DuplicateId, "region id repeated within image");
        continue;
      }

      std::array<double, 4> raw{};
      bool box_ok = true;
      for (std::size_t k = 0; k < 4; ++k) {
        auto v = parse_double(cell(row, cols.box[k]));
        if (!v || !std::isfinite(*v)) {
          box_ok = false;
          break;
        }
        raw[k] = *v;
      }
      if (!box_ok) {
        drop_row(CleaningReason::MissingBox, "box coordinates missing or not numeric");
        continue;
      }
      Box box = mapping.box_format == BoxFormat::Xyxy
                    ? Box{raw[0], raw[1], raw[2], raw[3]}
                    : Box{raw[0], raw[1], raw[0] + raw[2], raw[1] + raw[3]};
      if (!box.valid() || box.x_max > static_cast<double>(img.width) ||
          box.y_max > static_cast<double>(img.height)) {
        drop_row(CleaningReason::OutOfBoundsBox, "box empty or outside image bounds");
        continue;
      }

      CoarseClass label{};
      try {
        label = consolidate_label(cell(row, cols.label), mapping.labels);
      } catch (const Error& e) {
        drop_row(CleaningReason::InvalidMetadata, e.what());
        continue;
      }

      const auto flag_text = cell(row, cols.primary);
      const auto primary = flag_text.empty() ? std::optional<bool>(false) : parse_bool(flag_text);
      if (!primary) {
        drop_row(CleaningReason::InvalidMetadata, "unparseable primary flag");
        continue;
      }

      seen_ids.insert(rid);
      img.regions.push_back({rid, box, label, *primary});
      region_rows.push_back(r);
    }

    if (img.regions.empty()) {
      drop_image(CleaningReason::MissingBox, "no usable regions");
      continue;
    }

    bool have_primary = false;
    for (std::size_t i = 0; i < img.regions.size(); ++i) {
      auto& reg = img.regions[i];
      if (!reg.is_primary) continue;
      if (!have_primary) {
        have_primary = true;
        continue;
      }
      reg.is_primary = false;
      log.entries.push_back({region_rows[i] + 1, g.image_id, reg.region_id,
                             CleaningReason::NoPrimaryConflict, CleaningAction::Repaired,
                             "extra primary flag cleared; first primary in row order kept"});
    }
    if (!have_primary) {
      drop_image(CleaningReason::NoPrimary, "no region flagged primary");
      continue;
    }

    if (cols.image_label >= 0 && !cell(first, cols.image_label).empty()) {
      try {
        img.image_label = consolidate_label(cell(first, cols.image_label), mapping.labels);
      } catch (const Error& e) {
        drop_image(CleaningReason::InvalidMetadata, e.what());
        continue;
      }
    } else {
      img.image_label = img.primary().label;
    }

    result.images.push_back(std::move(img));
  }

  std::sort(result.images.begin(), result.images.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
  if (result.images.empty()) throw_validation("zero valid records after cleaning");
  return result;
}

IngestResult ingest_corpus(const std::filesystem::path& table_file, const ColumnMapping& mapping) {
  return ingest_table(load_table(table_file), mapping);
}

// ---------------------------------------------------------------------------
// Normalized corpus file

std::string image_to_json_line(const ImageRecord& image) {
  ojson j;
  j["image_id"] = image.image_id;
  j["width"] = image.width;
  j["height"] = image.height;
  j["difficulty"] = to_string(image.difficulty);
  j["emotion"] = image.emotion;
  j["image_label"] = to_string(image.image_label);
  ojson regions = ojson::array();
  for (const auto& r : image.regions) {
    ojson jr;
    jr["region_id"] = r.region_id;
    jr["box"] = {r.box.x_min, r.box.y_min, r.box.x_max, r.box.y_max};
    jr["label"] = to_string(r.label);
    jr["is_primary"] = r.is_primary;
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);
  return j.dump();
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& img : corpus) {
    out += image_to_json_line(img);
    out += '\n';
  }
  return out;
}

void write_corpus(std::ostream& out, const Corpus& corpus) { out << corpus_to_jsonl(corpus); }

namespace {

ImageRecord image_from_json(const nlohmann::json& j) {
  ImageRecord img;
  img.image_id = j.at("image_id").get<std::string>();
  img.width = j.at("width").get<std::int64_t>();
  img.height = j.at("height").get<std::int64_t>();
  auto diff = parse_difficulty(j.at("difficulty").get<std::string>());
  if (!diff) throw_validation("unknown difficulty");
  img.difficulty = *diff;
  img.emotion = j.at("emotion").get<std::string>();
  auto label = parse_coarse_class(j.at("image_label").get<std::string>());
  if (!label) throw_validation("unknown image_label");
  img.image_label = *label;
  for (const auto& jr : j.at("regions")) {
    RegionAnnotation r;
    r.region_id = jr.at("region_id").get<std::string>();
    const auto& b = jr.at("box");
    if (!b.is_array() || b.size() != 4) throw_validation("box must have four coordinates");
    r.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    auto rl = parse_coarse_class(jr.at("label").get<std::string>());
    if (!rl) throw_validation("unknown region label");
    r.label = *rl;
    r.is_primary = jr.at("is_primary").get<bool>();
    img.regions.push_back(std::move(r));
  }
  return img;
}

}  // namespace

Corpus parse_corpus(std::string_view text, std::string_view source) {
  Corpus corpus;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    ImageRecord img;
    try {
      img = image_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw_validation(where + ": " + e.what());
    } catch (const Error& e) {
      throw_validation(where + ": " + e.what());
    }
    if (auto problem = img.validate(); !problem.empty()) throw_validation(where + ": " + problem);
    if (!ids.insert(img.image_id).second) throw_validation(where + ": duplicate image_id " + img.image_id);
    corpus.push_back(std::move(img));
  }
  if (corpus.empty()) throw_validation(std::string(source) + ": corpus is empty");
  std::sort(corpus.begin(), corpus.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path), path.string()); }

std::string cleaning_log_to_jsonl(const CleaningLog& log) {
  std::string out;
  for (const auto& e : log.entries) {
    ojson j;
    j["row"] = e.row;
    j["image_id"] = e.image_id;
    j["region_id"] = e.region_id;
    j["reason"] = to_string(e.reason);
    j["action"] = to_string(e.action);
    j["detail"] = e.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string corpus_fingerprint(const Corpus& corpus) { return fingerprint(corpus_to_jsonl(corpus)); }

}  // namespace pareido
