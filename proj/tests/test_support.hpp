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
#include <vector>

#include "divmetric/distribution.hpp"
#include "divmetric/random.hpp"

namespace divmetric::testing {

inline Distribution<double> dist(std::vector<double> w) { return validate_distribution(w); }

// The two-point pair used throughout the numeric examples.
inline Distribution<double> fixture_p() { return dist({0.5, 0.5}); }
inline Distribution<double> fixture_q() { return dist({0.2, 0.8}); }

inline Distribution<double> random_dist(SplitMix64& rng, int n) { return dist(dirichlet_uniform(rng, n)); }

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace divmetric::testing
