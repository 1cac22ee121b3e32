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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divmetric/distribution.hpp"
#include "divmetric/metric.hpp"

namespace divmetric {

struct IndexedPoint {
  std::string id;
  Distribution<double> dist;
};

/// Result entries are ordered by (distance, id).
struct Neighbor {
  std::string id;
  double distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct QueryResult {
  std::vector<Neighbor> neighbors;
  std::size_t distance_evaluations = 0;
};

/// Vantage-point tree over distributions under a square-root divergence.
///
/// Each node holds a vantage point and the lower median mu of the distances
/// from it to the rest of its subtree; points at distance <= mu go to the
/// inner child, the others to the outer child. Queries prune with the
/// triangle inequality, so results are exact only when the MetricSpec
/// induces a true metric.
class VPTree {
 public:
  static constexpr std::int64_t kNoChild = -1;

  struct Node {
    std::size_t point;
    double radius;
    std::int64_t inner = kNoChild;
    std::int64_t outer = kNoChild;
  };

  /// `rooted = false` indexes under the raw divergence instead of its square
  /// root. That is not a metric in general; it exists as a negative control.
  static VPTree build(std::vector<IndexedPoint> points, const MetricSpec& metric, std::uint64_t seed,
                      bool rooted = true);

  /// Reassembles a tree from serialised parts and checks its structure and
  /// node invariants; throws SchemaMismatch if they do not hold.
  static VPTree from_parts(std::vector<IndexedPoint> points, const MetricSpec& metric, std::uint64_t seed,
                           std::vector<Node> nodes, std::int64_t root, bool rooted = true);

  QueryResult knn(const Distribution<double>& query, std::size_t k) const;
  QueryResult range(const Distribution<double>& query, double radius) const;

  /// Re-evaluates every node's split against its subtree and checks that each
  /// point is stored exactly once.
  bool check_invariants() const;

  const MetricSpec& metric() const { return metric_; }
  std::uint64_t seed() const { return seed_; }
  bool rooted() const { return rooted_; }
  const std::vector<IndexedPoint>& points() const { return points_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::int64_t root() const { return root_; }
  std::size_t size() const { return points_.size(); }
  Eigen::Index dimension() const { return points_.front().dist.size(); }
  std::size_t depth() const;

  /// Distance between a query and an indexed point; the same evaluation
  /// order is used by build, queries and the brute-force oracle.
  double distance(const Distribution<double>& query, std::size_t point) const;

 private:
  VPTree(std::vector<IndexedPoint> points, const MetricSpec& metric, std::uint64_t seed, bool rooted);

  std::vector<IndexedPoint> points_;
  MetricSpec metric_;
  std::uint64_t seed_;
  bool rooted_;
  std::vector<Node> nodes_;
  std::int64_t root_ = kNoChild;
};

/// Linear scan; the oracle for VPTree::knn.
QueryResult brute_force_knn(std::span<const IndexedPoint> points, const Distribution<double>& query,
                            std::size_t k, const MetricSpec& metric, bool rooted = true);

/// Linear scan; the oracle for VPTree::range.
QueryResult brute_force_range(std::span<const IndexedPoint> points, const Distribution<double>& query,
                              double radius, const MetricSpec& metric, bool rooted = true);

/// sqrt_distance(metric, a, b), or the raw divergence when `rooted` is false.
double index_distance(const MetricSpec& metric, bool rooted, const Distribution<double>& a,
                      const Distribution<double>& b);

}  // namespace divmetric
