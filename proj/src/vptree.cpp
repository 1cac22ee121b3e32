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

#include "divmetric/vptree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include "divmetric/errors.hpp"
#include "divmetric/random.hpp"

namespace divmetric {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
}

void sort_neighbors(std::vector<Neighbor>& list) { std::sort(list.begin(), list.end(), closer); }

// Widens pruning bounds by a few ulps so rounding in the triangle bound never
// discards a point that ties the current cutoff.
double slack(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::isfinite(c) ? std::abs(c) : 0.0});
  return 1e-12 * scale;
}

void require_homogeneous(std::span<const IndexedPoint> points) {
  for (const auto& p : points) {
    if (p.dist.size() != points.front().dist.size()) {
      throw Error(ErrorCode::LengthMismatch, "indexed distributions differ in length");
    }
  }
}

void require_query_length(std::span<const IndexedPoint> points, const Distribution<double>& query) {
  if (!points.empty() && query.size() != points.front().dist.size()) {
    throw Error(ErrorCode::LengthMismatch, "query length " + std::to_string(query.size()) +
                                               " does not match index dimension " +
                                               std::to_string(points.front().dist.size()));
  }
}

}  // namespace

double index_distance(const MetricSpec& metric, bool rooted, const Distribution<double>& a,
                      const Distribution<double>& b) {
  return rooted ? sqrt_distance(metric, a, b) : family_divergence(metric.family, metric.s, a, b);
}

VPTree::VPTree(std::vector<IndexedPoint> points, const MetricSpec& metric, std::uint64_t seed, bool rooted)
    : points_(std::move(points)), metric_(metric), seed_(seed), rooted_(rooted) {
  if (points_.empty()) throw Error(ErrorCode::EmptyInput, "cannot index an empty point set");
  require_homogeneous(points_);
}

double VPTree::distance(const Distribution<double>& query, std::size_t point) const {
  return index_distance(metric_, rooted_, query, points_[point].dist);
}

VPTree VPTree::build(std::vector<IndexedPoint> points, const MetricSpec& metric, std::uint64_t seed, bool rooted) {
  VPTree tree(std::move(points), metric, seed, rooted);
  const std::size_t n = tree.points_.size();
  tree.nodes_.reserve(n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<double> dist(n);
  SplitMix64 rng(seed);

  // Builds the subtree over order[lo, hi) and returns its node index.
  std::function<std::int64_t(std::size_t, std::size_t)> build_range = [&](std::size_t lo, std::size_t hi) {
    if (lo == hi) return kNoChild;
    std::swap(order[lo], order[lo + rng.below(hi - lo)]);
    const std::size_t vantage = order[lo];
    const auto index = static_cast<std::int64_t>(tree.nodes_.size());
    tree.nodes_.push_back({vantage, 0.0, kNoChild, kNoChild});
    if (hi - lo == 1) return index;

    const auto& vp = tree.points_[vantage].dist;
    for (std::size_t i = lo + 1; i < hi; ++i) dist[order[i]] = tree.distance(vp, order[i]);
    auto by_distance = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; };
    const auto first = order.begin() + static_cast<std::ptrdiff_t>(lo + 1);
    const auto last = order.begin() + static_cast<std::ptrdiff_t>(hi);
    const auto median = first + (last - first - 1) / 2;
    std::nth_element(first, median, last, by_distance);
    const double radius = dist[*median];
    // stable so the layout depends only on the seed and input order
    const auto split = std::stable_partition(first, last, [&](std::size_t i) { return dist[i] <= radius; });
    const auto mid = static_cast<std::size_t>(split - order.begin());

    const std::int64_t inner = build_range(lo + 1, mid);
    const std::int64_t outer = build_range(mid, hi);
    tree.nodes_[static_cast<std::size_t>(index)].radius = radius;
    tree.nodes_[static_cast<std::size_t>(index)].inner = inner;
    tree.nodes_[static_cast<std::size_t>(index)].outer = outer;
    return index;
  };
  tree.root_ = build_range(0, n);
  return tree;
}

VPTree VPTree::from_parts(std::vector<IndexedPoint> points, const MetricSpec& metric, std::uint64_t seed,
                          std::vector<Node> nodes, std::int64_t root, bool rooted) {
  VPTree tree(std::move(points), metric, seed, rooted);
  tree.nodes_ = std::move(nodes);
  tree.root_ = root;
  if (tree.nodes_.size() != tree.points_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "index has " + std::to_string(tree.nodes_.size()) + " nodes for " +
                                               std::to_string(tree.points_.size()) + " points");
  }
  if (!tree.check_invariants()) throw Error(ErrorCode::SchemaMismatch, "index nodes violate the tree invariants");
  return tree;
}

bool VPTree::check_invariants() const {
  const auto count = static_cast<std::int64_t>(nodes_.size());
  if (root_ < 0 || root_ >= count || nodes_.size() != points_.size()) return false;
  std::vector<char> node_seen(nodes_.size(), 0);
  std::vector<char> point_seen(points_.size(), 0);

  // Returns the points stored in the subtree, or nullopt on a structural fault.
  std::function<std::optional<std::vector<std::size_t>>(std::int64_t)> walk =
      [&](std::int64_t index) -> std::optional<std::vector<std::size_t>> {
    if (index == kNoChild) return std::vector<std::size_t>{};
    if (index < 0 || index >= count || node_seen[static_cast<std::size_t>(index)]) return std::nullopt;
    node_seen[static_cast<std::size_t>(index)] = 1;
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    if (node.point >= points_.size() || point_seen[node.point]) return std::nullopt;
    point_seen[node.point] = 1;

    auto inner = walk(node.inner);
    auto outer = walk(node.outer);
    if (!inner || !outer) return std::nullopt;
    const auto& vp = points_[node.point].dist;
    for (std::size_t i : *inner) {
      if (!(distance(vp, i) <= node.radius)) return std::nullopt;
    }
    for (std::size_t i : *outer) {
      if (!(distance(vp, i) > node.radius)) return std::nullopt;
    }
    std::vector<std::size_t> all = std::move(*inner);
    all.insert(all.end(), outer->begin(), outer->end());
    all.push_back(node.point);
    return all;
  };
  const auto all = walk(root_);
  return all && all->size() == points_.size();
}

std::size_t VPTree::depth() const {
  std::function<std::size_t(std::int64_t)> height = [&](std::int64_t index) -> std::size_t {
    if (index == kNoChild) return 0;
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    return 1 + std::max(height(node.inner), height(node.outer));
  };
  return height(root_);
}

QueryResult VPTree::knn(const Distribution<double>& query, std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
  require_query_length(points_, query);

  QueryResult result;
  // max-heap on (distance, id): top is the current k-th best
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(&closer)> best(closer);
  auto cutoff = [&] {
    return best.size() < k ? std::numeric_limits<double>::infinity() : best.top().distance;
  };

  std::function<void(std::int64_t)> search = [&](std::int64_t index) {
    if (index == kNoChild) return;
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    const double d = distance(query, node.point);
    ++result.distance_evaluations;
    Neighbor candidate{points_[node.point].id, d};
    if (best.size() < k) {
      best.push(std::move(candidate));
    } else if (closer(candidate, best.top())) {
      best.pop();
      best.push(std::move(candidate));
    }

    // inner points lie at distance >= d - mu, outer points at > mu - d
    auto visit_inner = [&] {
      const double tau = cutoff();
      if (d - node.radius <= tau + slack(d, node.radius, tau)) search(node.inner);
    };
    auto visit_outer = [&] {
      const double tau = cutoff();
      if (node.radius - d < tau + slack(d, node.radius, tau)) search(node.outer);
    };
    if (d <= node.radius) {
      visit_inner();
      visit_outer();
    } else {
      visit_outer();
      visit_inner();
    }
  };
  search(root_);

  result.neighbors.reserve(best.size());
  while (!best.empty()) {
    result.neighbors.push_back(best.top());
    best.pop();
  }
  std::reverse(result.neighbors.begin(), result.neighbors.end());
  return result;
}

QueryResult VPTree::range(const Distribution<double>& query, double radius) const {
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidConfig, "radius must be nonnegative");
  require_query_length(points_, query);

  QueryResult result;
  std::function<void(std::int64_t)> search = [&](std::int64_t index) {
    if (index == kNoChild) return;
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    const double d = distance(query, node.point);
    ++result.distance_evaluations;
    if (d <= radius) result.neighbors.push_back({points_[node.point].id, d});
    const double eps = slack(d, node.radius, radius);
    if (d - node.radius <= radius + eps) search(node.inner);
    if (node.radius - d < radius + eps) search(node.outer);
  };
  search(root_);
  sort_neighbors(result.neighbors);
  return result;
}

QueryResult brute_force_knn(std::span<const IndexedPoint> points, const Distribution<double>& query,
                            std::size_t k, const MetricSpec& metric, bool rooted) {
  if (k == 0) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
  require_homogeneous(points);
  require_query_length(points, query);
  QueryResult result;
  result.neighbors.reserve(points.size());
  for (const auto& p : points) result.neighbors.push_back({p.id, index_distance(metric, rooted, query, p.dist)});
  result.distance_evaluations = points.size();
  sort_neighbors(result.neighbors);
  if (result.neighbors.size() > k) result.neighbors.resize(k);
  return result;
}

QueryResult brute_force_range(std::span<const IndexedPoint> points, const Distribution<double>& query,
                              double radius, const MetricSpec& metric, bool rooted) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidConfig, "radius must be nonnegative");
  require_homogeneous(points);
  require_query_length(points, query);
  QueryResult result;
  for (const auto& p : points) {
    const double d = index_distance(metric, rooted, query, p.dist);
    if (d <= radius) result.neighbors.push_back({p.id, d});
  }
  result.distance_evaluations = points.size();
  sort_neighbors(result.neighbors);
  return result;
}

}  // namespace divmetric
