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

#include <optional>
#include <string>

namespace pareido {

/// One detector run on one padded ground-truth crop.
struct GtBoxResponse {
  std::string image_id;
  std::string region_id;
  std::string model_id;
  bool responded = false;             // r_j: any Human detection on the crop
  std::optional<double> human_score;  // s_j; present iff responded

  friend bool operator==(const GtBoxResponse&, const GtBoxResponse&) = default;
};

}  // namespace pareido
