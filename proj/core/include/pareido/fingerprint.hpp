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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pareido {

/// 64-bit FNV-1a. Stable across platforms, used for content fingerprints
/// and per-image seed derivation. Not a cryptographic hash.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes);
  Fnv1a& update(std::uint64_t value);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string fingerprint(std::string_view bytes);
std::string fingerprint_file(const std::filesystem::path& path);

/// Reads a whole file; throws Error(Io) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace pareido
