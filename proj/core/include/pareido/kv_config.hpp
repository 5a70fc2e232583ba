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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace pareido {

/// Flat `key = value` configuration. Lines starting with '#' and blank lines
/// are ignored; keys are trimmed and lowercased, values are trimmed.
/// Duplicate keys are rejected.
class KvConfig {
 public:
  static KvConfig parse(std::string_view text, std::string_view source = "<config>");
  static KvConfig load(const std::filesystem::path& path);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;

  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }
  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  std::filesystem::path base_dir_;
  std::string source_;
};

std::optional<bool> parse_bool(std::string_view text);

}  // namespace pareido
