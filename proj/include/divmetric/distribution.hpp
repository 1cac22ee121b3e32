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
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "divmetric/errors.hpp"
#include "divmetric/summation.hpp"

namespace divmetric {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Sum tolerance an input must meet before it is silently renormalised.
inline constexpr double kNormalizationTolerance = 1e-6;

/// Sum tolerance a constructed Distribution is guaranteed to meet.
inline constexpr double kSimplexTolerance = 1e-12;

struct ValidationOptions {
  /// Added to every entry before renormalising; admits zero masses.
  std::optional<double> smoothing;
  /// Divide by the sum even when it is further than 1e-6 from 1.
  bool renormalize = false;
};

template <typename Scalar>
class Distribution;

template <typename Scalar = double, typename Raw>
Distribution<Scalar> validate_distribution(const Raw& raw, const ValidationOptions& options = {});

template <typename Scalar = double, typename Raw>
Distribution<Scalar> exact_distribution(const Raw& raw);

/// A strictly positive probability vector of length >= 2. Only
/// validate_distribution and cast() construct one, so every instance is a
/// member of the open simplex.
template <typename Scalar>
class Distribution {
 public:
  using ScalarType = Scalar;

  Eigen::Index size() const { return weights_.size(); }
  const Vector<Scalar>& weights() const { return weights_; }
  auto array() const { return weights_.array(); }
  Scalar operator[](Eigen::Index i) const { return weights_[i]; }

  template <typename Other>
  Distribution<Other> cast() const {
    return Distribution<Other>(weights_.template cast<Other>());
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
  }

 private:
  template <typename>
  friend class Distribution;
  template <typename S, typename Raw>
  friend Distribution<S> validate_distribution(const Raw&, const ValidationOptions&);
  template <typename S, typename Raw>
  friend Distribution<S> exact_distribution(const Raw&);

  explicit Distribution(Vector<Scalar> w) : weights_(std::move(w)) {}

  Vector<Scalar> weights_;
};

/// Checks and normalises raw masses into a Distribution.
///
/// Without smoothing every entry must be strictly positive and the sum must
/// be within 1e-6 of one (or `renormalize` set); the result is divided by its
/// compensated sum. With smoothing `eps`, `eps` is added to each entry first
/// and the result is always renormalised.
template <typename Scalar, typename Raw>
Distribution<Scalar> validate_distribution(const Raw& raw, const ValidationOptions& options) {
  using std::abs;
  using std::isfinite;
  const auto n = static_cast<Eigen::Index>(std::size(raw));
  if (n < 2) {
    throw Error(ErrorCode::TooShort, "a distribution needs at least 2 entries, got " + std::to_string(n));
  }
  if (options.smoothing && !(*options.smoothing > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "smoothing must be positive");
  }

  Vector<Scalar> w(n);
  Eigen::Index i = 0;
  for (const auto& x : raw) w[i++] = static_cast<Scalar>(x);
  if (options.smoothing) w.array() += static_cast<Scalar>(*options.smoothing);

  for (i = 0; i < n; ++i) {
    if (!(w[i] > Scalar(0)) || !isfinite(w[i])) {
      throw Error(ErrorCode::ZeroOrNegativeMass,
                  "entry " + std::to_string(i) + " is not a finite positive mass");
    }
  }

  const Scalar total = compensated_sum(w);
  if (!options.smoothing && !options.renormalize &&
      abs(total - Scalar(1)) > Scalar(kNormalizationTolerance)) {
    throw Error(ErrorCode::NotNormalizable,
                "masses sum to " + std::to_string(static_cast<double>(total)) + ", not 1");
  }
  w /= total;
  return Distribution<Scalar>(std::move(w));
}

/// Accepts masses that are already a member of the simplex (positive, sum
/// within 1e-12 of one) and keeps them bit-for-bit, e.g. when reloading
/// serialised distributions.
template <typename Scalar, typename Raw>
Distribution<Scalar> exact_distribution(const Raw& raw) {
  using std::abs;
  ValidationOptions options;
  options.renormalize = true;
  Distribution<Scalar> checked = validate_distribution<Scalar>(raw, options);
  Vector<Scalar> w(checked.size());
  Eigen::Index i = 0;
  for (const auto& x : raw) w[i++] = static_cast<Scalar>(x);
  if (abs(compensated_sum(w) - Scalar(1)) > Scalar(kSimplexTolerance)) {
    throw Error(ErrorCode::NotNormalizable, "masses do not sum to 1 within 1e-12");
  }
  return Distribution<Scalar>(std::move(w));
}

template <typename Scalar>
void require_same_length(const Distribution<Scalar>& p, const Distribution<Scalar>& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::LengthMismatch, "distributions have lengths " + std::to_string(p.size()) +
                                               " and " + std::to_string(q.size()));
  }
}

}  // namespace divmetric
