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

#include <cstdio>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "divmetric/errors.hpp"
#include "divmetric/vptree.hpp"
#include "test_support.hpp"

namespace divmetric {
namespace {

std::string point_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%05d", i);
  return buf;
}

std::vector<IndexedPoint> random_points(std::uint64_t seed, int count, int n) {
  SplitMix64 rng(seed);
  std::vector<IndexedPoint> pts;
  for (int i = 0; i < count; ++i) pts.push_back({point_id(i), testing::random_dist(rng, n)});
  return pts;
}

const MetricSpec kHellinger{Family::J, SParam(0.5)};
const MetricSpec kJensenShannon{Family::AG, SParam(1)};

TEST(VPTree, KnnMatchesBruteForce) {
  for (const auto& m : {kHellinger, kJensenShannon}) {
    const auto tree = VPTree::build(random_points(1, 600, 8), m, 17);
    EXPECT_TRUE(tree.check_invariants());
    SplitMix64 rng(2);
    for (int q = 0; q < 40; ++q) {
      const auto query = testing::random_dist(rng, 8);
      for (std::size_t k : {1u, 5u, 10u}) {
        const auto got = tree.knn(query, k);
        const auto want = brute_force_knn(tree.points(), query, k, m);
        EXPECT_EQ(got.neighbors, want.neighbors);
        EXPECT_EQ(want.distance_evaluations, tree.size());
      }
    }
  }
}

TEST(VPTree, PrunesOnClusteredData) {
  // Well separated clusters let the tree skip most of the set.
  SplitMix64 rng(8);
  std::vector<IndexedPoint> pts;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> w(4, 0.01);
    w[static_cast<std::size_t>(i % 4)] = 0.97;
    for (auto& x : w) x *= 1.0 + 0.01 * rng.uniform();
    pts.push_back({point_id(i), validate_distribution(w, {.renormalize = true})});
  }
  const auto tree = VPTree::build(pts, kHellinger, 3);
  const auto r = tree.knn(pts[5].dist, 3);
  EXPECT_EQ(r.neighbors, brute_force_knn(tree.points(), pts[5].dist, 3, kHellinger).neighbors);
  EXPECT_LT(r.distance_evaluations, tree.size() / 2);
}

TEST(VPTree, DuplicatesAndTieOrder) {
  auto pts = random_points(4, 50, 5);
  for (int i = 0; i < 6; ++i) pts.push_back({"dup" + std::to_string(5 - i), pts[7].dist});
  const auto tree = VPTree::build(pts, kHellinger, 11);
  const auto exact = tree.range(pts[7].dist, 0.0);
  ASSERT_EQ(exact.neighbors.size(), 7u);
  for (std::size_t i = 1; i < exact.neighbors.size(); ++i) EXPECT_LT(exact.neighbors[i - 1].id, exact.neighbors[i].id);
  for (const auto& n : exact.neighbors) EXPECT_EQ(n.distance, 0.0);

  const auto k4 = tree.knn(pts[7].dist, 4);
  EXPECT_EQ(k4.neighbors, brute_force_knn(tree.points(), pts[7].dist, 4, kHellinger).neighbors);
  EXPECT_EQ(k4.neighbors.front().id, "dup0");
}

TEST(VPTree, RangeMatchesLinearScan) {
  const auto tree = VPTree::build(random_points(5, 400, 6), kJensenShannon, 5);
  SplitMix64 rng(6);
  for (int q = 0; q < 20; ++q) {
    const auto query = testing::random_dist(rng, 6);
    for (double radius : {0.0, 0.05, 0.2, 0.35, 10.0}) {
      const auto got = tree.range(query, radius);
      EXPECT_EQ(got.neighbors, brute_force_range(tree.points(), query, radius, kJensenShannon).neighbors);
      if (radius == 10.0) EXPECT_EQ(got.neighbors.size(), tree.size());
    }
  }
}

TEST(VPTree, KLargerThanSet) {
  const auto tree = VPTree::build(random_points(6, 7, 3), kHellinger, 1);
  EXPECT_EQ(tree.knn(tree.points()[0].dist, 50).neighbors.size(), 7u);
}

TEST(VPTree, SameSeedSameTree) {
  const auto pts = random_points(7, 300, 4);
  const auto a = VPTree::build(pts, kHellinger, 42);
  const auto b = VPTree::build(pts, kHellinger, 42);
  ASSERT_EQ(a.nodes().size(), b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    EXPECT_EQ(a.nodes()[i].point, b.nodes()[i].point);
    EXPECT_EQ(a.nodes()[i].radius, b.nodes()[i].radius);
  }
  const auto q = pts[3].dist;
  EXPECT_EQ(a.knn(q, 5).distance_evaluations, b.knn(q, 5).distance_evaluations);
}

TEST(VPTree, Errors) {
  const auto tree = VPTree::build(random_points(8, 20, 3), kHellinger, 1);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidConfig;
  };
  EXPECT_EQ(code([&] { tree.knn(testing::fixture_p(), 1); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code([&] { tree.range(testing::fixture_p(), 0.1); }), ErrorCode::LengthMismatch);
  EXPECT_THROW(tree.knn(tree.points()[0].dist, 0), Error);
  EXPECT_THROW(tree.range(tree.points()[0].dist, -1.0), Error);
  EXPECT_EQ(code([] { VPTree::build({}, kHellinger, 1); }), ErrorCode::EmptyInput);

  auto nodes = tree.nodes();
  nodes[static_cast<std::size_t>(tree.root())].radius *= 0.5;
  EXPECT_EQ(code([&] { VPTree::from_parts(tree.points(), tree.metric(), 1, nodes, tree.root()); }),
            ErrorCode::SchemaMismatch);
  nodes.pop_back();
  EXPECT_EQ(code([&] { VPTree::from_parts(tree.points(), tree.metric(), 1, nodes, tree.root()); }),
            ErrorCode::SchemaMismatch);
}

TEST(VPTree, FromPartsRoundTrip) {
  const auto tree = VPTree::build(random_points(9, 100, 4), kJensenShannon, 9);
  const auto copy = VPTree::from_parts(tree.points(), tree.metric(), tree.seed(), tree.nodes(), tree.root());
  const auto q = tree.points()[17].dist;
  EXPECT_EQ(copy.knn(q, 6).neighbors, tree.knn(q, 6).neighbors);
}

// Pruning is only sound for a metric: with the raw (un-rooted) triangular
// discrimination the tree returns wrong answers on some queries.
TEST(VPTree, UnrootedDistanceBreaksExactness) {
  const MetricSpec delta{Family::AG, SParam(2)};
  int mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 5 && mismatches == 0; ++seed) {
    const auto pts = random_points(100 + seed, 500, 3);
    const auto tree = VPTree::build(pts, delta, seed, /*rooted=*/false);
    SplitMix64 rng(seed);
    for (int q = 0; q < 100; ++q) {
      const auto query = testing::random_dist(rng, 3);
      if (tree.knn(query, 5).neighbors != brute_force_knn(tree.points(), query, 5, delta, false).neighbors) {
        ++mismatches;
      }
    }
  }
  EXPECT_GT(mismatches, 0);
}

}  // namespace
}  // namespace divmetric
