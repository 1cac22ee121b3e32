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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "divmetric/distribution.hpp"
#include "divmetric/metric.hpp"
#include "divmetric/sparam.hpp"

namespace divmetric {

enum class SampleMode { Scalar, Simplex };

constexpr std::string_view to_string(SampleMode m) { return m == SampleMode::Scalar ? "scalar" : "simplex"; }

struct SamplerConfig {
  std::uint64_t seed = 0;
  double lo = 1e-3;  // log-uniform scalar range
  double hi = 1e3;
  int simplex_n = 8;
  std::uint64_t trials = 1000;
  SampleMode mode = SampleMode::Scalar;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Triangle search

struct TriangleOptions {
  /// false plugs the raw divergence in as the distance (negative control).
  bool rooted = true;
  std::size_t max_witnesses = 16;
  /// 0 = hardware concurrency. Results do not depend on this.
  unsigned threads = 0;
};

struct Violation {
  Family family;
  double s;
  std::uint64_t trial;
  /// Three points x, y, z with d(x,z) > d(x,y) + d(y,z) + tol; scalars are
  /// stored as length-1 vectors.
  std::array<std::vector<double>, 3> triple;
  double lhs;
  double rhs;
  double excess;
  /// excess / largest of the three distances
  double relative_excess;
  /// Still a violation when recomputed in long double.
  bool confirmed_extended;
};

struct TriangleSearchResult {
  MetricSpec metric;
  bool rooted = true;
  std::uint64_t triples = 0;
  std::uint64_t violation_count = 0;
  /// First witnesses in trial order, at most TriangleOptions::max_witnesses.
  std::vector<Violation> witnesses;
  std::optional<Violation> worst;

  bool passed() const { return violation_count == 0; }
};

TriangleSearchResult triangle_search(const MetricSpec& m, const SamplerConfig& cfg, double tol_rel,
                                     const TriangleOptions& options = {});

// ---------------------------------------------------------------------------
// Inequality chain: Delta/4 <= I <= h <= 4d <= J/8 <= T <= Psi/16

inline constexpr std::array<std::string_view, 7> kChainNames = {"Delta/4", "I", "h", "4d", "J/8", "T", "Psi/16"};

struct ChainLink {
  double lhs;
  double rhs;
  bool holds;   // lhs <= rhs + tol_abs
  bool strict;  // lhs < rhs
};

struct ChainReport {
  std::array<double, 7> values{};
  std::array<ChainLink, 6> links{};
  bool passed = false;
  bool all_strict = false;
};

ChainReport chain_check(const Distribution<double>& P, const Distribution<double>& Q, double tol_abs);

struct ChainSweepConfig {
  std::uint64_t seed = 0;
  std::uint64_t pairs = 1000;
  int n_min = 2;
  int n_max = 32;
  double tol_abs = 1e-12;
  /// Strictness is required only when max_i |p_i - q_i| exceeds this.
  double strict_threshold = 1e-6;
  unsigned threads = 0;
};

struct ChainSweepResult {
  std::uint64_t pairs = 0;
  std::uint64_t failures = 0;
  std::uint64_t non_strict = 0;
  /// Trial indices of the first few failing or non-strict pairs.
  std::vector<std::uint64_t> witnesses;

  bool passed() const { return failures == 0 && non_strict == 0; }
};

ChainSweepResult chain_sweep(const ChainSweepConfig& cfg);

// ---------------------------------------------------------------------------
// Monotonicity probe of the sign function n(t) = d/dr D(p, r) at p/r = t.

/// n(t) for the pointwise divergence D of `family` at s.
double probe_n(Family family, SParam s, double t);
/// Closed-form n'(t).
double probe_n_derivative(Family family, SParam s, double t);
/// h(t) = n(t) / sqrt(D(t, 1)); undefined at t = 1.
double probe_h(Family family, SParam s, double t);

struct PairSumProbe {
  double beta;
  /// Sign changes of h(t) + h(beta t) across the grid.
  int sign_changes;
};

struct ProbeReport {
  Family family;
  double s;
  std::size_t points = 0;
  bool derivative_negative = false;
  double max_derivative = 0.0;
  int sign_changes = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool brackets_one = false;
  double n_at_one = 0.0;
  /// h > 0 for t < 1 and h < 0 for t > 1 at every grid point.
  bool h_sign_pattern = false;
  std::vector<PairSumProbe> pair_sums;

  bool passed() const { return derivative_negative && sign_changes == 1 && brackets_one && h_sign_pattern; }
};

ProbeReport monotonicity_probe(Family family, SParam s, std::span<const double> t_grid,
                               std::span<const double> betas = {});

/// `count` log-spaced points covering [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

// ---------------------------------------------------------------------------
// Asymptotic ratio D(P_t, Q) / chi2(P_t || Q) along P_t = Q + t (P0 - Q).

struct RatioRow {
  double t;
  double divergence;
  double chi2;
  double ratio;
  double error;  // |ratio - limit|
};

struct RatioTable {
  Family family;
  double s;
  double limit;
  std::vector<RatioRow> rows;
  bool error_decreasing = false;
  /// First t in the sequence whose relative error is within 1%.
  std::optional<double> first_within_one_percent;
};

/// 1/8 for the AG family, 1 for the J family.
double asymptotic_limit(Family family);

RatioTable asymptotic_probe(Family family, SParam s, const Distribution<double>& Q,
                            const Distribution<double>& P0, std::span<const double> t_seq);

}  // namespace divmetric
