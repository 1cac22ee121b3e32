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

#include "divmetric/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "divmetric/divergence.hpp"
#include "divmetric/errors.hpp"
#include "divmetric/random.hpp"
#include "parallel.hpp"

namespace divmetric {

void SamplerConfig::validate() const {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidConfig, "scalar range needs 0 < lo < hi");
  }
  if (simplex_n < 2) throw Error(ErrorCode::InvalidConfig, "simplex dimension must be at least 2");
  if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be at least 1");
}

namespace {

constexpr std::uint64_t kChunk = 4096;

template <typename Scalar>
Scalar scalar_distance(const MetricSpec& m, bool rooted, Scalar p, Scalar q) {
  using std::max;
  using std::sqrt;
  const Scalar v = detail::family_term(m.family, m.s, p, q);
  return rooted ? sqrt(max(Scalar(0), v)) : v;
}

template <typename Scalar>
Scalar simplex_distance(const MetricSpec& m, bool rooted, const Distribution<Scalar>& P,
                        const Distribution<Scalar>& Q) {
  using std::max;
  using std::sqrt;
  const Scalar v = family_divergence(m.family, m.s, P, Q);
  return rooted ? sqrt(max(Scalar(0), v)) : v;
}

// Distance between stored points in either mode, at the requested precision.
template <typename Scalar>
Scalar point_distance(const MetricSpec& m, bool rooted, const std::vector<double>& a,
                      const std::vector<double>& b) {
  if (a.size() == 1) return scalar_distance<Scalar>(m, rooted, a[0], b[0]);
  return simplex_distance(m, rooted, validate_distribution<Scalar>(a), validate_distribution<Scalar>(b));
}

struct ChunkFindings {
  std::uint64_t count = 0;
  std::vector<Violation> witnesses;
  std::optional<Violation> worst;
};

class TriangleChecker {
 public:
  TriangleChecker(const MetricSpec& m, bool rooted, double tol_rel, std::size_t max_witnesses)
      : m_(m), rooted_(rooted), tol_rel_(tol_rel), max_witnesses_(max_witnesses) {}

  // points[0..2] with precomputed pairwise distances d01, d02, d12.
  void check(std::uint64_t trial, const std::array<std::vector<double>, 3>& pts, double d01, double d02,
             double d12, ChunkFindings& out) const {
    const double scale = std::max({d01, d02, d12});
    // (x, y, z) with lhs = d(x, z), rhs = d(x, y) + d(y, z)
    consider(trial, {pts[0], pts[2], pts[1]}, d01, d02 + d12, scale, out);
    consider(trial, {pts[0], pts[1], pts[2]}, d02, d01 + d12, scale, out);
    consider(trial, {pts[1], pts[0], pts[2]}, d12, d01 + d02, scale, out);
  }

 private:
  void consider(std::uint64_t trial, std::array<std::vector<double>, 3> triple, double lhs, double rhs,
                double scale, ChunkFindings& out) const {
    const double excess = lhs - rhs;
    if (!(excess > tol_rel_ * scale)) return;
    Violation v{m_.family, m_.s.value(), trial, std::move(triple), lhs, rhs, excess,
                scale > 0.0 ? excess / scale : std::numeric_limits<double>::infinity(), false};
    v.confirmed_extended = confirm(v);
    ++out.count;
    if (!out.worst || v.relative_excess > out.worst->relative_excess) out.worst = v;
    if (out.witnesses.size() < max_witnesses_) out.witnesses.push_back(std::move(v));
  }

  bool confirm(const Violation& v) const {
    using Long = long double;
    const auto& [x, y, z] = v.triple;
    const Long xz = point_distance<Long>(m_, rooted_, x, z);
    const Long xy = point_distance<Long>(m_, rooted_, x, y);
    const Long yz = point_distance<Long>(m_, rooted_, y, z);
    const Long scale = std::max({xz, xy, yz});
    return xz - (xy + yz) > static_cast<Long>(tol_rel_) * scale;
  }

  MetricSpec m_;
  bool rooted_;
  double tol_rel_;
  std::size_t max_witnesses_;
};

}  // namespace

TriangleSearchResult triangle_search(const MetricSpec& m, const SamplerConfig& cfg, double tol_rel,
                                     const TriangleOptions& options) {
  cfg.validate();
  if (!(tol_rel >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be nonnegative");
  const TriangleChecker checker(m, options.rooted, tol_rel, options.max_witnesses);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    ChunkFindings found;
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      SplitMix64 rng = trial_stream(cfg.seed, trial);
      std::array<std::vector<double>, 3> pts;
      double d01, d02, d12;
      if (cfg.mode == SampleMode::Scalar) {
        for (auto& p : pts) p = {log_uniform(rng, cfg.lo, cfg.hi)};
        d01 = scalar_distance(m, options.rooted, pts[0][0], pts[1][0]);
        d02 = scalar_distance(m, options.rooted, pts[0][0], pts[2][0]);
        d12 = scalar_distance(m, options.rooted, pts[1][0], pts[2][0]);
      } else {
        for (auto& p : pts) p = dirichlet_uniform(rng, cfg.simplex_n);
        const auto a = validate_distribution(pts[0]);
        const auto b = validate_distribution(pts[1]);
        const auto c = validate_distribution(pts[2]);
        d01 = simplex_distance(m, options.rooted, a, b);
        d02 = simplex_distance(m, options.rooted, a, c);
        d12 = simplex_distance(m, options.rooted, b, c);
      }
      checker.check(trial, pts, d01, d02, d12, found);
    }
    return found;
  };

  TriangleSearchResult result{
      .metric = m, .rooted = options.rooted, .triples = cfg.trials, .violation_count = 0, .witnesses = {}, .worst = {}};
  for (auto& chunk : detail::run_chunked<ChunkFindings>(cfg.trials, kChunk, options.threads, work)) {
    result.violation_count += chunk.count;
    for (auto& w : chunk.witnesses) {
      if (result.witnesses.size() >= options.max_witnesses) break;
      result.witnesses.push_back(std::move(w));
    }
    if (chunk.worst && (!result.worst || chunk.worst->relative_excess > result.worst->relative_excess)) {
      result.worst = std::move(chunk.worst);
    }
  }
  return result;
}

ChainReport chain_check(const Distribution<double>& P, const Distribution<double>& Q, double tol_abs) {
  require_same_length(P, Q);
  ChainReport report;
  report.values = {
      named_divergence(NamedMeasure::Triangular, P, Q) / 4.0,
      named_divergence(NamedMeasure::JensenShannon, P, Q),
      named_divergence(NamedMeasure::Hellinger, P, Q),
      4.0 * named_divergence(NamedMeasure::DDivergence, P, Q),
      named_divergence(NamedMeasure::JDivergence, P, Q) / 8.0,
      named_divergence(NamedMeasure::ArithGeo, P, Q),
      named_divergence(NamedMeasure::SymChiSquared, P, Q) / 16.0,
  };
  report.passed = true;
  report.all_strict = true;
  for (std::size_t k = 0; k < report.links.size(); ++k) {
    const double lhs = report.values[k];
    const double rhs = report.values[k + 1];
    report.links[k] = {lhs, rhs, lhs <= rhs + tol_abs, lhs < rhs};
    report.passed = report.passed && report.links[k].holds;
    report.all_strict = report.all_strict && report.links[k].strict;
  }
  return report;
}

ChainSweepResult chain_sweep(const ChainSweepConfig& cfg) {
  if (cfg.n_min < 2 || cfg.n_max < cfg.n_min) throw Error(ErrorCode::InvalidConfig, "need 2 <= n_min <= n_max");
  constexpr std::size_t kMaxWitnesses = 16;

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    ChainSweepResult part;
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      SplitMix64 rng = trial_stream(cfg.seed, trial);
      const int n = cfg.n_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_max - cfg.n_min + 1)));
      const auto P = validate_distribution(dirichlet_uniform(rng, n));
      const auto Q = validate_distribution(dirichlet_uniform(rng, n));
      const ChainReport report = chain_check(P, Q, cfg.tol_abs);
      const bool strict_needed = (P.weights() - Q.weights()).cwiseAbs().maxCoeff() > cfg.strict_threshold;
      const bool failed = !report.passed;
      const bool loose = strict_needed && !report.all_strict;
      part.failures += failed;
      part.non_strict += loose;
      if ((failed || loose) && part.witnesses.size() < kMaxWitnesses) part.witnesses.push_back(trial);
      ++part.pairs;
    }
    return part;
  };

  ChainSweepResult total;
  for (const auto& part : detail::run_chunked<ChainSweepResult>(cfg.pairs, kChunk, cfg.threads, work)) {
    total.pairs += part.pairs;
    total.failures += part.failures;
    total.non_strict += part.non_strict;
    for (auto w : part.witnesses) {
      if (total.witnesses.size() < kMaxWitnesses) total.witnesses.push_back(w);
    }
  }
  return total;
}

double probe_n(Family family, SParam s, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveInput, "probe argument must be positive");
  const double sv = s.value();
  switch (s.regime(family)) {
    case Regime::LimitAGZero: return 0.5 * std::log((1.0 + t) / (2.0 * std::sqrt(t))) + (1.0 - t) / 4.0;
    case Regime::LimitAGOne: return 0.5 * std::log(2.0 / (1.0 + t));
    case Regime::LimitJ: return 1.0 - t - std::log(t);
    case Regime::Generic: break;
  }
  if (family == Family::AG) {
    const double mean = (1.0 + t) / 2.0;
    const double value = sv / 2.0 * std::pow(mean, 1.0 - sv) +
                         (std::pow(t, sv) + 1.0) / 4.0 * (1.0 - sv) * std::pow(mean, -sv) - 0.5;
    return value / (sv * (sv - 1.0));
  }
  return ((1.0 - sv) * std::pow(t, sv) + sv * std::pow(t, 1.0 - sv) - 1.0) / (sv * (sv - 1.0));
}

double probe_n_derivative(Family family, SParam s, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveInput, "probe argument must be positive");
  const double sv = s.value();
  if (family == Family::AG) {
    // -t psi_s''(t), valid in every regime
    return -std::pow((1.0 + t) / 2.0, -sv) * (t + std::pow(t, sv - 1.0)) / (4.0 * (1.0 + t));
  }
  return -(std::pow(t, sv - 1.0) + std::pow(t, -sv));
}

double probe_h(Family family, SParam s, double t) {
  return probe_n(family, s, t) / std::sqrt(family_point(family, s, t, 1.0));
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw Error(ErrorCode::InvalidConfig, "log grid needs 0 < lo < hi, count >= 2");
  std::vector<double> grid(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

namespace {

struct SignScan {
  int changes = 0;
  double lo = 0.0;
  double hi = 0.0;
};

// Sign changes of f over the grid; exact zeros neither start nor end a run.
template <typename Fn>
SignScan scan_signs(std::span<const double> grid, Fn f) {
  SignScan scan;
  int last_sign = 0;
  double last_t = 0.0;
  for (double t : grid) {
    const double v = f(t);
    const int sign = (v > 0.0) - (v < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      if (++scan.changes == 1) {
        scan.lo = last_t;
        scan.hi = t;
      }
    }
    last_sign = sign;
    last_t = t;
  }
  return scan;
}

}  // namespace

ProbeReport monotonicity_probe(Family family, SParam s, std::span<const double> t_grid,
                               std::span<const double> betas) {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty probe grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw Error(ErrorCode::InvalidConfig, "probe grid must be positive and strictly increasing");
    }
  }

  ProbeReport report;
  report.family = family;
  report.s = s.value();
  report.points = t_grid.size();
  report.max_derivative = -std::numeric_limits<double>::infinity();
  report.h_sign_pattern = true;
  for (double t : t_grid) {
    report.max_derivative = std::max(report.max_derivative, probe_n_derivative(family, s, t));
    if (t != 1.0) {
      const double h = probe_h(family, s, t);
      report.h_sign_pattern = report.h_sign_pattern && (t < 1.0 ? h > 0.0 : h < 0.0);
    }
  }
  report.derivative_negative = report.max_derivative < 0.0;

  const SignScan scan = scan_signs(t_grid, [&](double t) { return probe_n(family, s, t); });
  report.sign_changes = scan.changes;
  report.bracket_lo = scan.lo;
  report.bracket_hi = scan.hi;
  report.brackets_one = scan.changes >= 1 && scan.lo <= 1.0 && 1.0 <= scan.hi;
  report.n_at_one = probe_n(family, s, 1.0);

  for (double beta : betas) {
    // Grid points where t or beta*t hits 1 exactly have h undefined; treat as zero.
    auto pair_sum = [&](double t) {
      const double a = t == 1.0 ? 0.0 : probe_h(family, s, t);
      const double b = beta * t == 1.0 ? 0.0 : probe_h(family, s, beta * t);
      return a + b;
    };
    report.pair_sums.push_back({beta, scan_signs(t_grid, pair_sum).changes});
  }
  return report;
}

double asymptotic_limit(Family family) { return family == Family::AG ? 0.125 : 1.0; }

RatioTable asymptotic_probe(Family family, SParam s, const Distribution<double>& Q,
                            const Distribution<double>& P0, std::span<const double> t_seq) {
  require_same_length(Q, P0);
  const Vector<double> direction = P0.weights() - Q.weights();
  if (direction.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorCode::DegenerateDirection, "P0 equals Q; the path P_t is constant");
  }
  for (std::size_t i = 0; i < t_seq.size(); ++i) {
    if (!(t_seq[i] > 0.0 && t_seq[i] <= 1.0) || (i > 0 && !(t_seq[i] < t_seq[i - 1]))) {
      throw Error(ErrorCode::InvalidConfig, "t sequence must be decreasing within (0, 1]");
    }
  }

  RatioTable table;
  table.family = family;
  table.s = s.value();
  table.limit = asymptotic_limit(family);
  for (double t : t_seq) {
    const Vector<double> raw = Q.weights() + t * direction;
    const auto Pt = validate_distribution(raw);
    RatioRow row;
    row.t = t;
    row.divergence = family_divergence(family, s, Pt, Q);
    row.chi2 = chi_squared(Pt, Q);
    row.ratio = row.divergence / row.chi2;
    row.error = std::abs(row.ratio - table.limit);
    if (!table.first_within_one_percent && row.error <= 0.01 * table.limit) table.first_within_one_percent = t;
    table.rows.push_back(row);
  }
  table.error_decreasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    table.error_decreasing = table.error_decreasing && table.rows[i].error < table.rows[i - 1].error;
  }
  return table;
}

}  // namespace divmetric
