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
#include <cstdint>
#include <vector>

namespace divmetric {

/// SplitMix64. Used as a counter-seeded stream so trial i of a seeded run
/// draws the same numbers regardless of scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 mixer(seed ^ (trial * 0xd1b54a32d192ed03ULL));
  return SplitMix64(mixer.next());
}

/// exp(U(ln lo, ln hi)).
inline double log_uniform(SplitMix64& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

/// Uniform draw from the simplex (Dirichlet(1,...,1)) via normalised
/// exponentials, redrawn until every coordinate is at least `floor`.
inline std::vector<double> dirichlet_uniform(SplitMix64& rng, int n, double floor = 1e-9) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (;;) {
    double total = 0.0;
    for (auto& x : w) {
      x = -std::log1p(-rng.uniform());
      total += x;
    }
    bool ok = total > 0.0;
    for (auto& x : w) {
      x /= total;
      ok = ok && x >= floor;
    }
    if (ok) return w;
  }
}

}  // namespace divmetric
