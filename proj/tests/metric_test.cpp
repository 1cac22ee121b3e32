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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "divmetric/errors.hpp"
#include "divmetric/metric.hpp"
#include "test_support.hpp"

namespace divmetric {
namespace {

const std::vector<double> kLine = {0.0, 1.0, 2.5, 4.0, 7.0};

TEST(AxiomChecker, EuclideanLineIsMetric) {
  const auto r = check_metric_axioms([](double a, double b) { return std::abs(a - b); }, kLine, 1e-12);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.points, kLine.size());
}

TEST(AxiomChecker, SquaredEuclideanFailsTriangle) {
  const auto r = check_metric_axioms([](double a, double b) { return (a - b) * (a - b); }, kLine, 1e-12);
  EXPECT_GT(r.count(Axiom::Triangle), 0u);
  EXPECT_EQ(r.count(Axiom::Symmetry), 0u);
}

TEST(AxiomChecker, DetectsEachAxiom) {
  auto pseudo = [](double a, double b) { return std::abs(std::floor(a) - std::floor(b)); };
  EXPECT_GT(check_metric_axioms(pseudo, std::vector<double>{0.1, 0.2, 3.0}, 0.0).count(Axiom::Identity), 0u);

  auto skewed = [](double a, double b) { return a < b ? b - a : 2 * (a - b); };
  EXPECT_GT(check_metric_axioms(skewed, kLine, 1e-12).count(Axiom::Symmetry), 0u);

  auto negative = [](double a, double b) { return a == b ? 0.0 : -1.0; };
  EXPECT_GT(check_metric_axioms(negative, kLine, 0.0).count(Axiom::Nonnegativity), 0u);
}

TEST(AxiomChecker, NeedsThreePoints) {
  try {
    check_metric_axioms([](double a, double b) { return std::abs(a - b); }, std::vector<double>{1, 2}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST(SqrtDistance, ZeroOnSelfAndSymmetric) {
  const MetricSpec m{Family::J, SParam(0.5)};
  const auto P = testing::fixture_p();
  const auto Q = testing::fixture_q();
  EXPECT_EQ(sqrt_distance(m, P, P), 0.0);
  EXPECT_NEAR(sqrt_distance(m, P, Q), 0.6407289720278689, 1e-15);
  EXPECT_EQ(sqrt_distance(m, P, Q), sqrt_distance(m, Q, P));
}

TEST(SqrtDistance, JensenShannonRootIsMetricOnSamples) {
  SplitMix64 rng(21);
  std::vector<Distribution<double>> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(testing::random_dist(rng, 6));
  const MetricSpec m{Family::AG, SParam(1)};
  const auto r = check_metric_axioms([&](const auto& a, const auto& b) { return sqrt_distance(m, a, b); }, pts, 1e-9);
  EXPECT_TRUE(r.ok()) << r.violations.size() << " violations";
}

TEST(SqrtDistance, HellingerRootIsMetricOnScalars) {
  std::vector<double> pts;
  for (double x = 1e-3; x < 1e3; x *= 2.7) pts.push_back(x);
  const MetricSpec m{Family::J, SParam(0.5)};
  const auto r = check_metric_axioms([&](double a, double b) { return sqrt_point_distance(m, a, b); }, pts, 1e-9);
  EXPECT_TRUE(r.ok());
}

TEST(SqrtDistance, RootJDivergenceIsNotMetric) {
  // sqrt J(1,4) exceeds sqrt J(1,2) + sqrt J(2,4).
  const MetricSpec m{Family::J, SParam(0)};
  const auto r = check_metric_axioms([&](double a, double b) { return sqrt_point_distance(m, a, b); },
                                     std::vector<double>{1, 2, 4}, 1e-9);
  EXPECT_GT(r.count(Axiom::Triangle), 0u);
  EXPECT_GT(sqrt_point_distance(m, 1.0, 4.0), sqrt_point_distance(m, 1.0, 2.0) + sqrt_point_distance(m, 2.0, 4.0));
}

}  // namespace
}  // namespace divmetric
