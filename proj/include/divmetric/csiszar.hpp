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
#include <functional>
#include <string>
#include <utility>

#include "divmetric/distribution.hpp"
#include "divmetric/divergence.hpp"
#include "divmetric/errors.hpp"
#include "divmetric/sparam.hpp"
#include "divmetric/summation.hpp"

namespace divmetric {

/// A normalised convex function f (f(1) = 0, f''(1) > 0) driving
/// C_f(P||Q) = sum_i q_i f(p_i / q_i). Construct through make_generator so
/// the normalisation is checked.
template <typename Scalar>
struct ConvexGenerator {
  std::function<Scalar(Scalar)> eval;
  Scalar second_at_one;
  std::string name;
};

template <typename Scalar>
ConvexGenerator<Scalar> make_generator(std::function<Scalar(Scalar)> f, Scalar second_at_one,
                                       std::string name) {
  using std::abs;
  if (!f) throw Error(ErrorCode::InvalidGenerator, name + ": empty function");
  const Scalar at_one = f(Scalar(1));
  if (!(abs(at_one) <= Scalar(1e-12))) {
    throw Error(ErrorCode::InvalidGenerator, name + ": f(1) must be 0");
  }
  if (!(second_at_one > Scalar(0))) {
    throw Error(ErrorCode::InvalidGenerator, name + ": f''(1) must be positive");
  }
  return {std::move(f), second_at_one, std::move(name)};
}

namespace detail {

template <typename Scalar>
void require_positive(Scalar x) {
  if (!(x > Scalar(0))) throw Error(ErrorCode::NonPositiveInput, "generator argument must be positive");
}

}  // namespace detail

// Generator of the AG family: q psi_s(p/q) = L_s(p, q).

template <typename Scalar>
Scalar psi_s(SParam s, Scalar x) {
  using std::log;
  using std::pow;
  using std::sqrt;
  detail::require_positive(x);
  const Scalar mean = (x + Scalar(1)) / Scalar(2);
  switch (s.regime(Family::AG)) {
    case Regime::LimitAGZero: return mean * log(mean / sqrt(x));
    case Regime::LimitAGOne: return x / Scalar(2) * log(x) - mean * log(mean);
    default: break;
  }
  const Scalar sv = static_cast<Scalar>(s.value());
  return ((pow(x, sv) + Scalar(1)) / Scalar(2) * pow(mean, Scalar(1) - sv) - mean) / (sv * (sv - Scalar(1)));
}

template <typename Scalar>
Scalar psi_s_d1(SParam s, Scalar x) {
  using std::log;
  using std::pow;
  using std::sqrt;
  detail::require_positive(x);
  const Scalar mean = (x + Scalar(1)) / Scalar(2);
  switch (s.regime(Family::AG)) {
    case Regime::LimitAGZero: return log(mean / sqrt(x)) / Scalar(2) + (x - Scalar(1)) / (Scalar(4) * x);
    case Regime::LimitAGOne: return log(x / mean) / Scalar(2);
    default: break;
  }
  const Scalar sv = static_cast<Scalar>(s.value());
  const Scalar value = sv * pow(x, sv - Scalar(1)) / Scalar(2) * pow(mean, Scalar(1) - sv) +
                       (pow(x, sv) + Scalar(1)) / Scalar(4) * (Scalar(1) - sv) * pow(mean, -sv) -
                       Scalar(0.5);
  return value / (sv * (sv - Scalar(1)));
}

/// ((x^{s-2} + 1) / 8) ((x+1)/2)^{-s-1}; no limit split needed. Equals 1/4 at x = 1.
template <typename Scalar>
Scalar psi_s_d2(SParam s, Scalar x) {
  using std::pow;
  detail::require_positive(x);
  const Scalar sv = static_cast<Scalar>(s.value());
  return (pow(x, sv - Scalar(2)) + Scalar(1)) / Scalar(8) * pow((x + Scalar(1)) / Scalar(2), -sv - Scalar(1));
}

// Generator of the J family: q phi_s(p/q) = J_s(p, q).

template <typename Scalar>
Scalar phi_s(SParam s, Scalar x) {
  using std::log;
  using std::pow;
  detail::require_positive(x);
  if (s.regime(Family::J) == Regime::LimitJ) return (x - Scalar(1)) * log(x);
  const Scalar sv = static_cast<Scalar>(s.value());
  return (pow(x, sv) + pow(x, Scalar(1) - sv) - (Scalar(1) + x)) / (sv * (sv - Scalar(1)));
}

template <typename Scalar>
Scalar phi_s_d1(SParam s, Scalar x) {
  using std::log;
  using std::pow;
  detail::require_positive(x);
  if (s.regime(Family::J) == Regime::LimitJ) return Scalar(1) - Scalar(1) / x + log(x);
  const Scalar sv = static_cast<Scalar>(s.value());
  return (sv * pow(x, sv - Scalar(1)) + (Scalar(1) - sv) * pow(x, -sv) - Scalar(1)) / (sv * (sv - Scalar(1)));
}

/// x^{s-2} + x^{-s-1}; equals 2 at x = 1.
template <typename Scalar>
Scalar phi_s_d2(SParam s, Scalar x) {
  using std::pow;
  detail::require_positive(x);
  const Scalar sv = static_cast<Scalar>(s.value());
  return pow(x, sv - Scalar(2)) + pow(x, -sv - Scalar(1));
}

template <typename Scalar = double>
ConvexGenerator<Scalar> make_psi_generator(SParam s) {
  return make_generator<Scalar>([s](Scalar x) { return psi_s(s, x); }, psi_s_d2(s, Scalar(1)),
                                "psi_s(" + std::to_string(s.value()) + ")");
}

template <typename Scalar = double>
ConvexGenerator<Scalar> make_phi_generator(SParam s) {
  return make_generator<Scalar>([s](Scalar x) { return phi_s(s, x); }, phi_s_d2(s, Scalar(1)),
                                "phi_s(" + std::to_string(s.value()) + ")");
}

template <typename Scalar>
Scalar csiszar_divergence(const ConvexGenerator<Scalar>& f, const Distribution<Scalar>& P,
                          const Distribution<Scalar>& Q) {
  return detail::sum_terms(P, Q, [&f](Scalar p, Scalar q) { return q * f.eval(p / q); });
}

/// Small-deviation prediction (f''(1)/2) chi2(P||Q) for C_f(P||Q).
template <typename Scalar>
Scalar chi2_prediction(const ConvexGenerator<Scalar>& f, const Distribution<Scalar>& P,
                       const Distribution<Scalar>& Q) {
  return f.second_at_one / Scalar(2) * chi_squared(P, Q);
}

}  // namespace divmetric
