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

#include "pareido/kv_config.hpp"

#include "pareido/error.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/text.hpp"

namespace pareido {

KvConfig KvConfig::parse(std::string_view text, std::string_view source) {
  KvConfig cfg;
  cfg.source_ = std::string(source);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    const std::string where = cfg.source_ + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw_validation(where + ": expected key = value");
    std::string key = to_lower(trim(line.substr(0, eq)));
    if (key.empty()) throw_validation(where + ": empty key");
    std::string value(trim(line.substr(eq + 1)));
    if (!cfg.entries_.emplace(key, std::move(value)).second) {
      throw_validation(where + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  KvConfig cfg = parse(read_file(path), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool KvConfig::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> KvConfig::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::require(std::string_view key) const {
  auto v = get(key);
  if (!v) throw_validation(source_ + ": missing required key '" + std::string(key) + "'");
  return *v;
}

std::optional<double> KvConfig::get_double(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  auto d = parse_double(*v);
  if (!d) throw_validation(source_ + ": key '" + std::string(key) + "' is not a number");
  return d;
}

std::optional<bool> KvConfig::get_bool(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  auto b = parse_bool(*v);
  if (!b) throw_validation(source_ + ": key '" + std::string(key) + "' is not a boolean");
  return b;
}

std::optional<bool> parse_bool(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "y") return true;
  if (t == "0" || t == "false" || t == "no" || t == "n") return false;
  return std::nullopt;
}

}  // namespace pareido
