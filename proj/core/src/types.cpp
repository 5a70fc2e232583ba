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

#include "pareido/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "pareido/text.hpp"

namespace pareido {

std::string_view to_string(CoarseClass c) {
  switch (c) {
    case CoarseClass::Human: return "Human";
    case CoarseClass::Animal: return "Animal";
    case CoarseClass::Cartoon: return "Cartoon";
    case CoarseClass::Alien: return "Alien";
    case CoarseClass::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Medium: return "Medium";
    case Difficulty::Hard: return "Hard";
  }
  return "Easy";
}

std::optional<CoarseClass> parse_coarse_class(std::string_view text) {
  const std::string key = to_lower(trim(text));
  for (CoarseClass c : kAllClasses) {
    if (key == to_lower(to_string(c))) return c;
  }
  return std::nullopt;
}

std::optional<Difficulty> parse_difficulty(std::string_view text) {
  const std::string key = to_lower(trim(text));
  for (Difficulty d : kAllDifficulties) {
    if (key == to_lower(to_string(d))) return d;
  }
  return std::nullopt;
}

std::string canonicalize_emotion(std::string_view raw) {
  std::string out = to_lower(trim(raw));
  if (out.empty()) return "unknown";
  return out;
}

bool Box::valid() const {
  for (double v : {x_min, y_min, x_max, y_max}) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return x_max > x_min && y_max > y_min;
}

std::size_t ImageRecord::primary_index() const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].is_primary) return i;
  }
  return 0;
}

std::string ImageRecord::validate() const {
  if (image_id.empty()) return "empty image_id";
  if (width <= 0 || height <= 0) return "non-positive image dimensions";
  if (regions.empty()) return "no regions";
  if (emotion.empty() || emotion != canonicalize_emotion(emotion)) {
    return "emotion label not canonical";
  }
  std::size_t primaries = 0;
  std::set<std::string> ids;
  for (const auto& r : regions) {
    if (r.is_primary) ++primaries;
    if (!ids.insert(r.region_id).second) return "duplicate region_id " + r.region_id;
    if (!r.box.valid()) return "invalid box on region " + r.region_id;
    if (r.box.x_max > static_cast<double>(width) ||
        r.box.y_max > static_cast<double>(height)) {
      return "box outside image on region " + r.region_id;
    }
  }
  if (primaries != 1) return "expected exactly one primary region";
  return {};
}

}  // namespace pareido
