// Copyright 2026 The divmetric Authors
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
#include <string_view>

namespace divmetric {

enum class ErrorCode {
  ZeroOrNegativeMass,
  NotNormalizable,
  TooShort,
  NonPositiveInput,
  LengthMismatch,
  DegenerateDirection,
  InvalidGenerator,
  InvalidConfig,
  EmptyInput,
  MetricMismatch,
  SchemaMismatch,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroOrNegativeMass: return "ZeroOrNegativeMass";
    case ErrorCode::NotNormalizable: return "NotNormalizable";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::InvalidGenerator: return "InvalidGenerator";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MetricMismatch: return "MetricMismatch";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

/// Thrown by every checked operation in the library. The code identifies the
/// violated precondition so callers (the CLI in particular) can map it to an
/// exit status without parsing messages.
class Error : public std::invalid_argument {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::invalid_argument(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace divmetric
