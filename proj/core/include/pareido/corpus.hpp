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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pareido/kv_config.hpp"
#include "pareido/types.hpp"

namespace pareido {

/// Fine-grained resemblance label -> coarse class. Keys are stored
/// canonicalized (trimmed, lowercase).
struct LabelMap {
  std::map<std::string, CoarseClass, std::less<>> table;
  bool default_to_other = true;

  /// The five coarse names mapped onto themselves.
  static LabelMap identity(bool default_to_other = true);

  /// Entries of the form `fine label = Coarse`. The reserved key `default`
  /// (other | none) controls the fallback for unmapped labels.
  static LabelMap from_config(const KvConfig& cfg);
  static LabelMap load(const std::filesystem::path& path);
};

/// Throws Error(Validation) for an unmapped label when defaults are disabled.
CoarseClass consolidate_label(std::string_view fine_label, const LabelMap& map);

enum class BoxFormat { Xyxy, Xywh };

/// Names the source columns of an annotation table. Loaded from a key-value
/// file; see README for the recognised keys.
struct ColumnMapping {
  std::string image_id;
  std::string region_id;  // optional; regions are numbered r1, r2, ... in row order when empty
  BoxFormat box_format = BoxFormat::Xyxy;
  std::array<std::string, 4> box;  // xyxy: x_min,y_min,x_max,y_max; xywh: x,y,w,h
  std::string width;
  std::string height;
  std::string label;
  std::string image_label;  // optional; defaults to the primary region's label
  std::string difficulty;
  std::string emotion;  // optional; missing emotion canonicalizes to "unknown"
  std::string primary;
  std::string corrupt;  // optional truthy flag marking unusable images
  LabelMap labels = LabelMap::identity();

  static ColumnMapping from_config(const KvConfig& cfg);
  static ColumnMapping load(const std::filesystem::path& path);

  /// Every column name the mapping refers to, required ones first.
  std::vector<std::string> required_columns() const;
  std::vector<std::string> optional_columns() const;
};

enum class CleaningReason {
  CorruptImage,
  MissingBox,
  NoPrimary,
  OutOfBoundsBox,
  DuplicateId,
  NoPrimaryConflict,
  InvalidMetadata,
};

enum class CleaningAction { DroppedRow, DroppedImage, Repaired };

std::string_view to_string(CleaningReason r);
std::string_view to_string(CleaningAction a);

struct CleaningEntry {
  std::size_t row = 0;  // 1-based data row; 0 for image-level entries
  std::string image_id;
  std::string region_id;
  CleaningReason reason = CleaningReason::InvalidMetadata;
  CleaningAction action = CleaningAction::DroppedRow;
  std::string detail;
};

struct CleaningLog {
  std::vector<CleaningEntry> entries;
  std::size_t input_rows = 0;
  std::size_t input_groups = 0;  // distinct non-empty image ids

  std::size_t dropped_images() const;
  std::size_t count(CleaningReason reason) const;
};

/// In-memory delimited or JSON table. All cells are kept as text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::ptrdiff_t column(std::string_view name) const;
};

/// RFC 4180 style: quoted fields, doubled quotes, CRLF tolerated.
Table parse_delimited(std::string_view text, char delimiter);
/// JSON array of flat objects; the header is the union of keys in first-seen order.
Table parse_json_table(std::string_view text);
/// Dispatches on extension: .json, .tsv/.tab (tab), anything else comma.
Table load_table(const std::filesystem::path& path);

struct IngestResult {
  Corpus images;  // sorted by image_id
  CleaningLog log;
};

IngestResult ingest_table(const Table& table, const ColumnMapping& mapping);
IngestResult ingest_corpus(const std::filesystem::path& table_file, const ColumnMapping& mapping);

// Normalized corpus file: one JSON object per line, fixed key order.
std::string image_to_json_line(const ImageRecord& image);
std::string corpus_to_jsonl(const Corpus& corpus);
void write_corpus(std::ostream& out, const Corpus& corpus);
Corpus parse_corpus(std::string_view text, std::string_view source = "<corpus>");
Corpus read_corpus(const std::filesystem::path& path);

std::string cleaning_log_to_jsonl(const CleaningLog& log);

/// Content hash of the canonical serialization.
std::string corpus_fingerprint(const Corpus& corpus);

}  // namespace pareido
