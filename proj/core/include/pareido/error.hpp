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

#include <stdexcept>
#include <string>

namespace pareido {

/// Failure categories; the CLI maps them onto its exit codes.
enum class ErrorKind { Usage, Validation, Io, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_validation(const std::string& what);
[[noreturn]] void throw_io(const std::string& what);

/// 0 success, 1 usage, 2 input validation (including unreadable input), 3 internal.
int exit_code_for(ErrorKind kind);

}  // namespace pareido
