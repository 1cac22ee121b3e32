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
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "divmetric/distribution.hpp"
#include "divmetric/errors.hpp"
#include "divmetric/sparam.hpp"
#include "divmetric/summation.hpp"

namespace divmetric {

enum class NamedMeasure {
  Triangular,     // Delta = sum (p-q)^2 / (p+q)
  JensenShannon,  // I
  ArithGeo,       // T
  Hellinger,      // h = 1/2 sum (sqrt p - sqrt q)^2
  DDivergence,    // d = 1 - sum ((sqrt p + sqrt q)/2) sqrt((p+q)/2)
  JDivergence,    // J = sum (p-q) ln(p/q)
  SymChiSquared,  // Psi = chi2(P||Q) + chi2(Q||P)
  ChiSquared,     // chi2(P||Q) = sum (p-q)^2 / q, not symmetric
};

inline constexpr std::array<NamedMeasure, 8> kAllNamedMeasures = {
    NamedMeasure::Triangular,  NamedMeasure::JensenShannon, NamedMeasure::ArithGeo,
    NamedMeasure::Hellinger,   NamedMeasure::DDivergence,   NamedMeasure::JDivergence,
    NamedMeasure::SymChiSquared, NamedMeasure::ChiSquared};

constexpr std::string_view to_string(NamedMeasure m) {
  switch (m) {
    case NamedMeasure::Triangular: return "triangular";
    case NamedMeasure::JensenShannon: return "jensen-shannon";
    case NamedMeasure::ArithGeo: return "arith-geo";
    case NamedMeasure::Hellinger: return "hellinger";
    case NamedMeasure::DDivergence: return "d";
    case NamedMeasure::JDivergence: return "j-divergence";
    case NamedMeasure::SymChiSquared: return "sym-chi2";
    case NamedMeasure::ChiSquared: return "chi2";
  }
  return "";
}

inline std::optional<NamedMeasure> parse_named_measure(std::string_view name) {
  for (auto m : kAllNamedMeasures) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

namespace detail {

template <typename Scalar>
void require_positive(Scalar p, Scalar q) {
  if (!(p > Scalar(0)) || !(q > Scalar(0))) {
    throw Error(ErrorCode::NonPositiveInput, "pointwise divergences need p > 0 and q > 0");
  }
}

// Relative difference (p-q)/(p+q), in (-1, 1) for positive arguments.
template <typename Scalar>
Scalar rel_diff(Scalar p, Scalar q) {
  return (p - q) / (p + q);
}

// ((1+x) ln(1+x) + (1-x) ln(1-x)) / 2 without cancellation near x = 0.
template <typename Scalar>
Scalar half_entropy_gap(Scalar x) {
  using std::abs;
  using std::log1p;
  if (abs(x) < Scalar(0.05)) {
    // sum_k x^{2k} / (2k (2k-1))
    const Scalar x2 = x * x;
    Scalar power = x2;
    Scalar sum(0);
    for (int k = 1; k <= 9; ++k) {
      sum += power / Scalar(2 * k * (2 * k - 1));
      power *= x2;
    }
    return sum;
  }
  return ((Scalar(1) + x) * log1p(x) + (Scalar(1) - x) * log1p(-x)) / Scalar(2);
}

template <typename Scalar>
Scalar jensen_shannon_term(Scalar p, Scalar q) {
  return (p + q) / Scalar(2) * half_entropy_gap(rel_diff(p, q));
}

template <typename Scalar>
Scalar arith_geo_term(Scalar p, Scalar q) {
  using std::log1p;
  const Scalar x = rel_diff(p, q);
  return -(p + q) / Scalar(4) * log1p(-x * x);
}

template <typename Scalar>
Scalar j_limit_term(Scalar p, Scalar q) {
  using std::atanh;
  return Scalar(2) * (p - q) * atanh(rel_diff(p, q));
}

template <typename Scalar>
Scalar ag_generic_term(Scalar s, Scalar p, Scalar q) {
  using std::expm1;
  using std::log1p;
  const Scalar mean = (p + q) / Scalar(2);
  const Scalar x = rel_diff(p, q);
  const Scalar a = log1p(x);   // ln(p/mean)
  const Scalar b = log1p(-x);  // ln(q/mean)
  Scalar excess;
  if (s <= Scalar(0.5)) {
    excess = mean * (expm1(s * a) + expm1(s * b)) / Scalar(2);
  } else {
    // (p/m)^s = (p/m) (p/m)^{-(1-s)} keeps the s -> 1 end free of cancellation
    const Scalar u = Scalar(1) - s;
    excess = mean * ((Scalar(1) + x) * expm1(-u * a) + (Scalar(1) - x) * expm1(-u * b)) / Scalar(2);
  }
  return excess / (s * (s - Scalar(1)));
}

template <typename Scalar>
Scalar j_generic_term(Scalar s, Scalar p, Scalar q) {
  using std::atanh;
  using std::expm1;
  const Scalar r = s <= Scalar(0.5) ? s : Scalar(1) - s;
  const Scalar log_ratio = Scalar(2) * atanh(rel_diff(p, q));
  return (q * expm1(r * log_ratio) + p * expm1(-r * log_ratio)) / (r * (r - Scalar(1)));
}

// Unchecked pointwise kernels; callers guarantee p, q > 0.
template <typename Scalar>
Scalar ag_term(SParam s, Scalar p, Scalar q) {
  switch (s.regime(Family::AG)) {
    case Regime::LimitAGOne: return jensen_shannon_term(p, q);
    case Regime::LimitAGZero: return arith_geo_term(p, q);
    default: return ag_generic_term(static_cast<Scalar>(s.value()), p, q);
  }
}

template <typename Scalar>
Scalar j_term(SParam s, Scalar p, Scalar q) {
  if (s.regime(Family::J) == Regime::LimitJ) return j_limit_term(p, q);
  return j_generic_term(static_cast<Scalar>(s.value()), p, q);
}

template <typename Scalar>
Scalar family_term(Family family, SParam s, Scalar p, Scalar q) {
  return family == Family::AG ? ag_term(s, p, q) : j_term(s, p, q);
}

template <typename Scalar>
Scalar named_term(NamedMeasure kind, Scalar p, Scalar q) {
  using std::sqrt;
  const Scalar diff = p - q;
  switch (kind) {
    case NamedMeasure::Triangular: return diff * diff / (p + q);
    case NamedMeasure::JensenShannon: return jensen_shannon_term(p, q);
    case NamedMeasure::ArithGeo: return arith_geo_term(p, q);
    case NamedMeasure::Hellinger: {
      const Scalar root_sum = sqrt(p) + sqrt(q);
      return diff * diff / (Scalar(2) * root_sum * root_sum);
    }
    case NamedMeasure::DDivergence: {
      // mean - ((sqrt p + sqrt q)/2) sqrt(mean), rewritten without cancellation
      const Scalar root_mean = sqrt((p + q) / Scalar(2));
      const Scalar root_sum = sqrt(p) + sqrt(q);
      const Scalar root_gap_sq = diff * diff / (root_sum * root_sum);
      return root_mean * root_gap_sq / (Scalar(4) * (root_mean + root_sum / Scalar(2)));
    }
    case NamedMeasure::JDivergence: return j_limit_term(p, q);
    case NamedMeasure::SymChiSquared: return diff * diff * (p + q) / (p * q);
    case NamedMeasure::ChiSquared: return diff * diff / q;
  }
  return Scalar(0);
}

template <typename Scalar, typename Kernel>
Scalar sum_terms(const Distribution<Scalar>& P, const Distribution<Scalar>& Q, Kernel kernel) {
  require_same_length(P, Q);
  return compensated_sum(P.array().binaryExpr(Q.array(), kernel));
}

}  // namespace detail

/// Pointwise AG family member L_s(p, q) on positive reals.
template <typename Scalar>
Scalar ag_point(SParam s, Scalar p, Scalar q) {
  detail::require_positive(p, q);
  return detail::ag_term(s, p, q);
}

/// Pointwise J family member J_s(p, q); equals J_{1-s}(p, q).
template <typename Scalar>
Scalar j_point(SParam s, Scalar p, Scalar q) {
  detail::require_positive(p, q);
  return detail::j_term(s, p, q);
}

template <typename Scalar>
Scalar family_point(Family family, SParam s, Scalar p, Scalar q) {
  detail::require_positive(p, q);
  return detail::family_term(family, s, p, q);
}

template <typename Scalar>
Scalar ag_divergence(SParam s, const Distribution<Scalar>& P, const Distribution<Scalar>& Q) {
  return detail::sum_terms(P, Q, [s](Scalar p, Scalar q) { return detail::ag_term(s, p, q); });
}

template <typename Scalar>
Scalar j_divergence(SParam s, const Distribution<Scalar>& P, const Distribution<Scalar>& Q) {
  return detail::sum_terms(P, Q, [s](Scalar p, Scalar q) { return detail::j_term(s, p, q); });
}

template <typename Scalar>
Scalar family_divergence(Family family, SParam s, const Distribution<Scalar>& P,
                         const Distribution<Scalar>& Q) {
  return family == Family::AG ? ag_divergence(s, P, Q) : j_divergence(s, P, Q);
}

template <typename Scalar>
Scalar named_point(NamedMeasure kind, Scalar p, Scalar q) {
  detail::require_positive(p, q);
  return detail::named_term(kind, p, q);
}

template <typename Scalar>
Scalar named_divergence(NamedMeasure kind, const Distribution<Scalar>& P, const Distribution<Scalar>& Q) {
  return detail::sum_terms(P, Q, [kind](Scalar p, Scalar q) { return detail::named_term(kind, p, q); });
}

/// One-sided chi2(P||Q) = sum (p_i - q_i)^2 / q_i.
template <typename Scalar>
Scalar chi_squared(const Distribution<Scalar>& P, const Distribution<Scalar>& Q) {
  return named_divergence(NamedMeasure::ChiSquared, P, Q);
}

}  // namespace divmetric
