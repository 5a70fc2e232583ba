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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pareido {

/// The unified five-way label space. Every probability vector in the
/// library is indexed in this order.
enum class CoarseClass : std::uint8_t { Human = 0, Animal, Cartoon, Alien, Other };

inline constexpr std::size_t kNumClasses = 5;
inline constexpr std::array<CoarseClass, kNumClasses> kAllClasses = {
    CoarseClass::Human, CoarseClass::Animal, CoarseClass::Cartoon,
    CoarseClass::Alien, CoarseClass::Other};

enum class Difficulty : std::uint8_t { Easy = 0, Medium, Hard };

inline constexpr std::size_t kNumDifficulties = 3;
inline constexpr std::array<Difficulty, kNumDifficulties> kAllDifficulties = {
    Difficulty::Easy, Difficulty::Medium, Difficulty::Hard};

constexpr std::size_t index_of(CoarseClass c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index_of(Difficulty d) { return static_cast<std::size_t>(d); }

std::string_view to_string(CoarseClass c);
std::string_view to_string(Difficulty d);

// Case-insensitive; surrounding whitespace ignored.
std::optional<CoarseClass> parse_coarse_class(std::string_view text);
std::optional<Difficulty> parse_difficulty(std::string_view text);

/// Trimmed, lowercased emotion label. Empty input canonicalizes to "unknown".
std::string canonicalize_emotion(std::string_view raw);

/// Pixel box, half-open: [x_min, x_max) x [y_min, y_max).
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return (x_min + x_max) / 2.0; }
  double center_y() const { return (y_min + y_max) / 2.0; }

  /// Finite, non-negative coordinates and strictly positive area.
  bool valid() const;

  friend bool operator==(const Box&, const Box&) = default;
};

struct RegionAnnotation {
  std::string region_id;
  Box box;
  CoarseClass label = CoarseClass::Other;
  bool is_primary = false;

  friend bool operator==(const RegionAnnotation&, const RegionAnnotation&) = default;
};

struct ImageRecord {
  std::string image_id;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<RegionAnnotation> regions;
  Difficulty difficulty = Difficulty::Easy;
  std::string emotion = "unknown";
  CoarseClass image_label = CoarseClass::Other;

  /// Index of the single primary region. Only meaningful on a record that
  /// passed validate().
  std::size_t primary_index() const;
  const RegionAnnotation& primary() const { return regions[primary_index()]; }

  /// Empty when every invariant holds, otherwise a description of the first
  /// violation.
  std::string validate() const;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

using Corpus = std::vector<ImageRecord>;

}  // namespace pareido
