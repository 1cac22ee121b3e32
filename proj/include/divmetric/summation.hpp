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
#include <iterator>
#include <ranges>

namespace divmetric {

/// Kahan-Babuska (Neumaier) running sum. Unlike plain Kahan it stays exact
/// when an addend is larger in magnitude than the running total.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    using std::abs;
    const Scalar t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Scalar x) {
    add(x);
    return *this;
  }

  Scalar value() const { return sum_ + compensation_; }

 private:
  Scalar sum_{0};
  Scalar compensation_{0};
};

/// Compensated sum over any range, including Eigen arrays and expressions
/// (which model begin()/end() since Eigen 3.4).
template <typename Range>
auto compensated_sum(const Range& values) {
  using Scalar = std::remove_cvref_t<decltype(*std::begin(values))>;
  CompensatedSum<Scalar> acc;
  for (const auto& v : values) acc.add(v);
  return acc.value();
}

}  // namespace divmetric
