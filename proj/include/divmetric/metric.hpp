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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "divmetric/distribution.hpp"
#include "divmetric/divergence.hpp"
#include "divmetric/errors.hpp"
#include "divmetric/sparam.hpp"

namespace divmetric {

/// Selects the square-root distance sqrt(family_s).
struct MetricSpec {
  Family family;
  SParam s;

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

template <typename Scalar>
Scalar sqrt_point_distance(const MetricSpec& m, Scalar p, Scalar q) {
  using std::max;
  using std::sqrt;
  return sqrt(max(Scalar(0), family_point(m.family, m.s, p, q)));
}

/// sqrt(sum_i family_s(p_i, q_i)). This is the root-sum-of-squares of the
/// coordinate distances, so it is a metric on the simplex whenever the
/// pointwise square root is a metric on the positive reals.
template <typename Scalar>
Scalar sqrt_distance(const MetricSpec& m, const Distribution<Scalar>& P, const Distribution<Scalar>& Q) {
  using std::max;
  using std::sqrt;
  return sqrt(max(Scalar(0), family_divergence(m.family, m.s, P, Q)));
}

enum class Axiom { Nonnegativity, Identity, Symmetry, Triangle };

constexpr std::string_view to_string(Axiom a) {
  switch (a) {
    case Axiom::Nonnegativity: return "nonnegativity";
    case Axiom::Identity: return "identity";
    case Axiom::Symmetry: return "symmetry";
    case Axiom::Triangle: return "triangle";
  }
  return "";
}

struct AxiomViolation {
  Axiom axiom;
  // Point indices; for Triangle, d(i,k) > d(i,j) + d(j,k). Unused slots repeat.
  std::size_t i, j, k;
  double lhs, rhs;
};

struct AxiomReport {
  std::size_t points = 0;
  std::vector<AxiomViolation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(Axiom a) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [a](const auto& v) { return v.axiom == a; }));
  }
};

/// Exhaustively checks the four metric axioms of `distance` over `points`.
/// Symmetry and triangle slack is `tol` times the largest distance involved;
/// identity slack is `tol` times the largest distance in the set.
template <typename T, typename DistanceFn, typename Equal = std::equal_to<>>
AxiomReport check_metric_axioms(DistanceFn&& distance, std::span<const T> points, double tol,
                                Equal equal = {}) {
  const std::size_t n = points.size();
  if (n < 3) throw Error(ErrorCode::InvalidConfig, "metric axiom check needs at least 3 points");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be nonnegative");

  std::vector<double> d(n * n);
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = static_cast<double>(distance(points[i], points[j]));
      largest = std::max(largest, std::abs(d[i * n + j]));
    }
  }
  auto at = [&](std::size_t i, std::size_t j) { return d[i * n + j]; };

  AxiomReport report;
  report.points = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = at(i, j);
      if (dij < 0.0) report.violations.push_back({Axiom::Nonnegativity, i, j, j, dij, 0.0});
      const bool same = i == j || equal(points[i], points[j]);
      if (same ? std::abs(dij) > tol * largest : dij == 0.0) {
        report.violations.push_back({Axiom::Identity, i, j, j, dij, 0.0});
      }
      if (i < j) {
        const double dji = at(j, i);
        if (std::abs(dij - dji) > tol * std::max(std::abs(dij), std::abs(dji))) {
          report.violations.push_back({Axiom::Symmetry, i, j, j, dij, dji});
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double lhs = at(i, k);
        const double rhs = at(i, j) + at(j, k);
        const double scale = std::max({lhs, at(i, j), at(j, k)});
        if (lhs > rhs + tol * scale) report.violations.push_back({Axiom::Triangle, i, j, k, lhs, rhs});
      }
    }
  }
  return report;
}

template <typename T, typename DistanceFn, typename Equal = std::equal_to<>>
AxiomReport check_metric_axioms(DistanceFn&& distance, const std::vector<T>& points, double tol,
                                Equal equal = {}) {
  return check_metric_axioms<T>(std::forward<DistanceFn>(distance), std::span<const T>(points), tol, equal);
}

}  // namespace divmetric
