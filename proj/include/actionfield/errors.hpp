// Copyright 2026 The Actionfield Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace actionfield {

// Exit-code taxonomy shared by the C API and the CLI.
enum class ErrorKind : int {
  kConfig = 1,
  kData = 2,
  kDivergence = 3,
  kInternal = 4,
};

// Base error. `what()` is a one-line machine-parsable reason such as
// "config.missing_key:io.dataset".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& reason)
      : std::runtime_error(reason), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& reason)
      : Error(ErrorKind::kConfig, reason) {}
};

// Shape or layout mismatch between paired structures.
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& reason)
      : Error(ErrorKind::kConfig, "structure." + reason) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& reason)
      : Error(ErrorKind::kData, reason) {}
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& reason)
      : Error(ErrorKind::kDivergence, reason) {}
};

}  // namespace actionfield
