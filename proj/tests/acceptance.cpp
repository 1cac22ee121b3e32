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

// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "divmetric/cli.hpp"
#include "divmetric/csiszar.hpp"
#include "divmetric/divergence.hpp"
#include "divmetric/random.hpp"
#include "divmetric/verify.hpp"
#include "divmetric/vptree.hpp"

using namespace divmetric;

namespace {

const std::vector<double> kGrid = {-2, -1, -0.5, 0, 0.5, 1, 1.5, 2};
constexpr Family kFamilies[] = {Family::AG, Family::J};

struct Outcome {
  bool passed;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Distribution<double> dist(std::vector<double> w) { return validate_distribution(w); }

// 1. Every named special case of both families, on random pairs.
Outcome special_cases() {
  struct Identity {
    const char* name;
    Family family;
    double s;
    NamedMeasure measure;
    double factor;
  };
  const Identity ids[] = {
      {"AG(-1)=Delta/4", Family::AG, -1, NamedMeasure::Triangular, 0.25},
      {"AG(1)=I", Family::AG, 1, NamedMeasure::JensenShannon, 1},
      {"AG(1/2)=4d", Family::AG, 0.5, NamedMeasure::DDivergence, 4},
      {"AG(0)=T", Family::AG, 0, NamedMeasure::ArithGeo, 1},
      {"AG(2)=Psi/16", Family::AG, 2, NamedMeasure::SymChiSquared, 1.0 / 16},
      {"J(-1)=Psi/2", Family::J, -1, NamedMeasure::SymChiSquared, 0.5},
      {"J(2)=Psi/2", Family::J, 2, NamedMeasure::SymChiSquared, 0.5},
      {"J(0)=J", Family::J, 0, NamedMeasure::JDivergence, 1},
      {"J(1)=J", Family::J, 1, NamedMeasure::JDivergence, 1},
      {"J(1/2)=8h", Family::J, 0.5, NamedMeasure::Hellinger, 8},
  };
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> worst(std::size(ids), 0.0);
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    auto rng = trial_stream(2024, trial);
    const int n = 2 + static_cast<int>(rng.below(63));
    const auto P = dist(dirichlet_uniform(rng, n));
    const auto Q = dist(dirichlet_uniform(rng, n));
    for (std::size_t i = 0; i < std::size(ids); ++i) {
      const double got = family_divergence(ids[i].family, SParam(ids[i].s), P, Q);
      const double want = ids[i].factor * named_divergence(ids[i].measure, P, Q);
      worst[i] = std::max(worst[i], rel_err(got, want));
    }
  }
  const double elapsed = seconds_since(start);
  bool ok = elapsed < 10.0;
  std::string failed;
  for (std::size_t i = 0; i < std::size(ids); ++i) {
    if (!(worst[i] <= 1e-10)) {
      ok = false;
      failed += fmt(" %s(max rel err %.3g)", ids[i].name, worst[i]);
    }
  }
  return {ok, fmt("1000 pairs, n in [2,64], %.2fs;", elapsed) + (failed.empty() ? " all identities within 1e-10" : " failing:" + failed)};
}

// 2. The inequality chain on random pairs.
Outcome chain() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = chain_sweep({.seed = 2024, .pairs = 100000, .tol_abs = 1e-12, .strict_threshold = 1e-6});
  const double elapsed = seconds_since(start);
  return {r.passed() && elapsed < 60.0,
          fmt("%llu pairs, %llu failures, %llu non-strict, %.2fs", static_cast<unsigned long long>(r.pairs),
              static_cast<unsigned long long>(r.failures), static_cast<unsigned long long>(r.non_strict), elapsed)};
}

// 3. Randomised triangle search for the square-root distances.
Outcome triangles() {
  const auto start = std::chrono::steady_clock::now();
  const SamplerConfig scalar{.seed = 2024, .lo = 1e-3, .hi = 1e3, .trials = 1000000, .mode = SampleMode::Scalar};
  const SamplerConfig simplex{.seed = 2024, .simplex_n = 8, .trials = 100000, .mode = SampleMode::Simplex};
  std::string failing;
  std::string metric_ok;
  for (Family f : kFamilies) {
    for (double s : kGrid) {
      const MetricSpec m{f, SParam(s)};
      const auto a = triangle_search(m, scalar, 1e-9);
      const auto b = triangle_search(m, simplex, 1e-9);
      if (a.passed() && b.passed()) {
        metric_ok += fmt(" %s(%g)", std::string(to_string(f)).c_str(), s);
      } else {
        failing += fmt(" %s(%g):%llu/%llu", std::string(to_string(f)).c_str(), s,
                       static_cast<unsigned long long>(a.violation_count),
                       static_cast<unsigned long long>(b.violation_count));
      }
    }
  }
  const auto control = triangle_search({Family::AG, SParam(2)}, {.seed = 2024, .trials = 10000}, 1e-9,
                                       {.rooted = false});
  const double elapsed = seconds_since(start);
  const bool ok = failing.empty() && !control.passed() && elapsed < 600.0;
  std::string detail = fmt("%.1fs; negative control violations %llu;", elapsed,
                           static_cast<unsigned long long>(control.violation_count));
  detail += " violation-free:" + (metric_ok.empty() ? std::string(" none") : metric_ok);
  if (!failing.empty()) detail += "; violations (scalar/simplex):" + failing;
  return {ok, detail};
}

// 4. Continuity of the AG family at its two limits.
Outcome limits() {
  const auto P = dist({0.5, 0.5});
  const auto Q = dist({0.2, 0.8});
  const double T = named_divergence(NamedMeasure::ArithGeo, P, Q);
  const double I = named_divergence(NamedMeasure::JensenShannon, P, Q);
  bool ok = true;
  std::string detail;
  for (const auto& [target, name, centre] : {std::tuple{T, "T", 0.0}, std::tuple{I, "I", 1.0}}) {
    double previous = INFINITY;
    for (double off : {1e-3, 1e-4, 1e-5}) {
      const double dev = std::max(rel_err(ag_divergence(SParam(centre - off), P, Q), target),
                                  rel_err(ag_divergence(SParam(centre + off), P, Q), target));
      ok = ok && dev < previous;
      previous = dev;
    }
    ok = ok && previous <= 1e-4;
    detail += fmt(" %s: rel dev %.3g at offset 1e-5;", name, previous);
  }
  return {ok, detail.substr(1)};
}

// 5. Generator second derivatives.
Outcome derivatives() {
  double worst_at_one = 0.0;
  double worst_fd = 0.0;
  for (double s : kGrid) {
    const SParam sp(s);
    worst_at_one = std::max({worst_at_one, std::abs(psi_s_d2(sp, 1.0) - 0.25), std::abs(phi_s_d2(sp, 1.0) - 2.0)});
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double h = 1e-4 * x;
      auto fd = [&](auto f) { return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h); };
      worst_fd = std::max(worst_fd, rel_err(psi_s_d2(sp, x), fd([&](double y) { return psi_s(sp, y); })));
      worst_fd = std::max(worst_fd, rel_err(phi_s_d2(sp, x), fd([&](double y) { return phi_s(sp, y); })));
    }
  }
  return {worst_at_one <= 1e-14 && worst_fd <= 1e-6,
          fmt("max |f''(1) - expected| %.3g, max finite-difference rel err %.3g", worst_at_one, worst_fd)};
}

// 6. Ratio to chi2 along a line towards Q.
Outcome asymptotics() {
  const auto Q = dist({0.2, 0.8});
  const auto P0 = dist({0.5, 0.5});
  const std::vector<double> ts = {1e-1, 1e-2, 1e-3};
  bool ok = true;
  double worst = 0.0;
  std::string failing;
  for (Family f : kFamilies) {
    for (double s : kGrid) {
      const auto table = asymptotic_probe(f, SParam(s), Q, P0, ts);
      const double rel = table.rows.back().error / table.limit;
      worst = std::max(worst, rel);
      if (!(rel <= 0.01 && table.error_decreasing)) {
        ok = false;
        failing += fmt(" %s(%g)", std::string(to_string(f)).c_str(), s);
      }
    }
  }
  return {ok, fmt("worst relative error at t=1e-3: %.3g", worst) + (failing.empty() ? "" : "; failing:" + failing)};
}

// 7. Monotonicity and single sign change of the n-functions.
Outcome probes() {
  const auto grid = log_grid(1e-2, 1e2, 10000);
  bool ok = true;
  std::string failing;
  for (Family f : kFamilies) {
    for (double s : kGrid) {
      const auto r = monotonicity_probe(f, SParam(s), grid);
      if (!(r.derivative_negative && r.sign_changes == 1 && r.brackets_one)) {
        ok = false;
        failing += fmt(" %s(%g)", std::string(to_string(f)).c_str(), s);
      }
    }
  }
  return {ok, "10000 grid points, 16 (family, s) pairs" + (failing.empty() ? std::string() : "; failing:" + failing)};
}

// 8. Exact nearest neighbours from the vantage-point tree.
Outcome index_exactness() {
  SplitMix64 rng(2024);
  std::vector<IndexedPoint> points;
  for (int i = 0; i < 2000; ++i) points.push_back({fmt("p%04d", i), dist(dirichlet_uniform(rng, 16))});
  std::vector<Distribution<double>> queries;
  for (int i = 0; i < 100; ++i) queries.push_back(dist(dirichlet_uniform(rng, 16)));

  bool exact = true;
  std::string detail;
  for (const MetricSpec& m : {MetricSpec{Family::J, SParam(0.5)}, MetricSpec{Family::AG, SParam(1)}}) {
    const auto tree = VPTree::build(points, m, 2024);
    std::size_t evaluations = 0;
    for (const auto& q : queries) {
      const auto got = tree.knn(q, 10);
      evaluations += got.distance_evaluations;
      exact = exact && got.neighbors == brute_force_knn(tree.points(), q, 10, m).neighbors;
    }
    const double ratio = static_cast<double>(evaluations) / (100.0 * 2000.0);
    detail += fmt(" %s(%g): evaluation ratio %.3f (target <= 0.60%s);", std::string(to_string(m.family)).c_str(),
                  m.s.value(), ratio, ratio <= 0.6 ? ", met" : ", not met");
  }
  return {exact, (exact ? "knn identical to brute force;" : "knn differs from brute force;") + detail};
}

// 9. Byte-identical reports from repeated seeded commands.
Outcome determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / ("divmetric_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    SplitMix64 rng(9);
    std::ofstream pts(dir / "points.csv");
    std::ofstream qs(dir / "queries.csv");
    pts.precision(17);
    qs.precision(17);
    for (int i = 0; i < 400; ++i) {
      auto& out = i < 380 ? pts : qs;
      const auto w = dirichlet_uniform(rng, 8);
      for (std::size_t k = 0; k < w.size(); ++k) out << (k ? "," : "") << w[k];
      out << '\n';
    }
  }
  const std::string points = (dir / "points.csv").string();
  const std::string queries = (dir / "queries.csv").string();
  const std::string index = (dir / "index.json").string();
  const std::vector<std::vector<std::string>> commands = {
      {"compute", "--family", "ag", "--s", "0.5", "--sqrt", "--input", points, "--pairs", "first"},
      {"verify", "triangle", "--seed", "5", "--trials", "20000"},
      {"verify", "triangle", "--seed", "5", "--trials", "2000", "--mode", "simplex"},
      {"verify", "chain", "--seed", "5", "--pairs", "20000"},
      {"verify", "probe", "--points", "2000"},
      {"verify", "asymptotic"},
      {"index", "build", "--input", points, "--family", "j", "--s", "0.5", "--seed", "5", "--output", index},
      {"index", "query", "--index", index, "--queries", queries, "--k", "10"},
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  std::size_t identical = 0;
  std::string index_bytes;
  for (const auto& args : commands) {
    std::ostringstream first, second, err;
    cli::run(args, first, err);
    const std::string index_first = slurp(index);
    cli::run(args, second, err);
    if (first.str() == second.str() && !first.str().empty() && slurp(index) == index_first) ++identical;
  }
  fs::remove_all(dir);
  return {identical == commands.size(), fmt("%zu/%zu seeded commands byte-identical on repeat", identical, commands.size())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"special-case identities", special_cases},
      {"inequality chain", chain},
      {"square-root metric triangle search", triangles},
      {"limit continuity", limits},
      {"generator second derivatives", derivatives},
      {"chi2 asymptotics", asymptotics},
      {"n-function probes", probes},
      {"index exactness", index_exactness},
      {"determinism", determinism},
  };
  int failures = 0;
  int number = 0;
  for (const auto& [name, check] : criteria) {
    ++number;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.passed ? 0 : 1;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  criterion " << number << " (" << name << "): " << o.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
