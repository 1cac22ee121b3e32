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

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "divmetric/errors.hpp"

namespace divmetric {

/// AG: the arithmetic-geometric family, interpolating Jensen-Shannon (s=1)
/// and the arithmetic-geometric mean divergence (s=0).
/// J: the family symmetric under s <-> 1-s with J-divergence at s=0,1.
enum class Family { AG, J };

enum class Regime { Generic, LimitAGZero, LimitAGOne, LimitJ };

/// Half-width of the window around s=0 and s=1 where the closed-form limit
/// replaces the generic [s(s-1)]^-1 expression.
inline constexpr double kLimitTolerance = 1e-6;

class SParam {
 public:
  explicit SParam(double value) : value_(value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidConfig, "s must be finite");
  }

  double value() const { return value_; }

  Regime regime(Family family) const {
    const bool near_zero = std::abs(value_) < kLimitTolerance;
    const bool near_one = std::abs(value_ - 1.0) < kLimitTolerance;
    if (family == Family::J) return (near_zero || near_one) ? Regime::LimitJ : Regime::Generic;
    if (near_one) return Regime::LimitAGOne;
    if (near_zero) return Regime::LimitAGZero;
    return Regime::Generic;
  }

  friend bool operator==(const SParam&, const SParam&) = default;

 private:
  double value_;
};

constexpr std::string_view to_string(Family f) { return f == Family::AG ? "ag" : "j"; }

inline std::optional<Family> parse_family(std::string_view name) {
  if (name == "ag" || name == "AG") return Family::AG;
  if (name == "j" || name == "J") return Family::J;
  return std::nullopt;
}

}  // namespace divmetric
