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

#include "divmetric/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "divmetric/divergence.hpp"
#include "divmetric/errors.hpp"
#include "divmetric/io.hpp"
#include "divmetric/metric.hpp"
#include "divmetric/verify.hpp"
#include "divmetric/vptree.hpp"

namespace divmetric::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kIndexFormat = "divmetric-vptree";
constexpr int kIndexSchemaVersion = 1;
constexpr double kGridTolerance = 1e-12;

double parse_double(std::string_view text, std::string_view what) {
  const auto first = text.find_first_not_of(' ');
  const auto last = text.find_last_not_of(' ');
  if (first == std::string_view::npos) throw Error(ErrorCode::InvalidConfig, "empty " + std::string(what));
  text = text.substr(first, last - first + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidConfig, "invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  for (;;) {
    const auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) return parts;
    text.remove_prefix(pos + 1);
  }
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> values;
  for (auto part : split(text, ',')) values.push_back(parse_double(part, what));
  return values;
}

SParam checked_s(double value) {
  const bool exact = value == 0.0 || value == 1.0;
  if (!exact && (std::abs(value) < kLimitTolerance || std::abs(value - 1.0) < kLimitTolerance)) {
    throw Error(ErrorCode::InvalidConfig, "s = " + std::to_string(value) +
                                              " is inside the limit window around 0 or 1; pass 0 or 1 exactly");
  }
  return SParam(value);
}

std::uint64_t resolve_seed(const CLI::Option* option, std::uint64_t value) {
  if (option->count() > 0) return value;
  if (const char* env = std::getenv("DIVMETRIC_SEED")) {
    std::uint64_t seed = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorCode::InvalidConfig, "DIVMETRIC_SEED is not an unsigned integer");
    }
    return seed;
  }
  return 0;
}

std::vector<Family> parse_families(const std::string& text) {
  if (text == "both") return {Family::AG, Family::J};
  if (auto f = parse_family(text)) return {*f};
  throw Error(ErrorCode::InvalidConfig, "unknown family '" + text + "' (ag, j, both)");
}

Json s_list_json(const std::vector<SParam>& values) {
  Json list = Json::array();
  for (const auto& s : values) list.push_back(s.value());
  return list;
}

// Input options shared by every command that reads histogram files.
struct InputFlags {
  std::string format = "auto";
  bool id_column = false;
  std::optional<double> smooth;
  bool renormalize = false;

  void attach(CLI::App* app) {
    app->add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "csv", "jsonl"}));
    app->add_flag("--id-column", id_column, "CSV rows start with an id field");
    app->add_option("--smooth", smooth, "Add this mass to every entry, then renormalise");
    app->add_flag("--renormalize", renormalize, "Renormalise rows whose sum is not within 1e-6 of 1");
  }

  HistogramReadOptions options_for(const std::string& path) const {
    HistogramReadOptions options;
    options.format = format == "auto" ? format_from_path(path)
                     : format == "csv" ? HistogramFormat::Csv
                                       : HistogramFormat::Jsonl;
    options.id_column = id_column;
    options.validation.smoothing = smooth;
    options.validation.renormalize = renormalize;
    return options;
  }

  Json to_json() const {
    Json j;
    j["format"] = format;
    j["id_column"] = id_column;
    j["smooth"] = smooth ? Json(*smooth) : Json(nullptr);
    j["renormalize"] = renormalize;
    return j;
  }
};

Json metric_json(const MetricSpec& m) {
  Json j;
  j["family"] = std::string(to_string(m.family));
  j["s"] = m.s.value();
  return j;
}

Json neighbors_json(const std::vector<Neighbor>& list) {
  Json arr = Json::array();
  for (const auto& n : list) arr.push_back(Json{{"id", n.id}, {"distance", n.distance}});
  return arr;
}

Json violation_json(const Violation& v) {
  Json triple = Json::array();
  for (const auto& p : v.triple) triple.push_back(p.size() == 1 ? Json(p[0]) : Json(p));
  return Json{{"family", std::string(to_string(v.family))},
              {"s", v.s},
              {"trial", v.trial},
              {"triple", triple},
              {"lhs", v.lhs},
              {"rhs", v.rhs},
              {"excess", v.excess},
              {"relative_excess", v.relative_excess},
              {"confirmed_extended", v.confirmed_extended}};
}

struct Report {
  Json json;
  int exit_code = kSuccess;
};

Report make_report(const std::vector<std::string>& args, std::string command) {
  Report r;
  r.json["command"] = std::move(command);
  r.json["args"] = args;
  r.json["config"] = Json::object();
  r.json["seed"] = nullptr;
  r.json["results"] = Json::array();
  r.json["violations"] = Json::array();
  r.json["passed"] = true;
  r.json["timing"] = nullptr;
  return r;
}

// ---------------------------------------------------------------------------

struct ComputeFlags {
  std::string measure;
  std::string family;
  std::string s;
  bool sqrt = false;
  std::string input;
  std::string other;
  std::string pairs = "adjacent";
  InputFlags in;
};

Report cmd_compute(const ComputeFlags& f, const std::vector<std::string>& args) {
  std::optional<NamedMeasure> measure;
  std::optional<MetricSpec> spec;
  if (!f.measure.empty()) {
    if (!f.family.empty() || !f.s.empty()) throw Error(ErrorCode::InvalidConfig, "use either --measure or --family/--s");
    measure = parse_named_measure(f.measure);
    if (!measure) throw Error(ErrorCode::InvalidConfig, "unknown measure '" + f.measure + "'");
  } else {
    if (f.family.empty() || f.s.empty()) throw Error(ErrorCode::InvalidConfig, "need --measure or both --family and --s");
    const auto family = parse_family(f.family);
    if (!family) throw Error(ErrorCode::InvalidConfig, "unknown family '" + f.family + "'");
    spec = MetricSpec{*family, parse_s(f.s)};
  }

  const auto rows = read_histogram_file(f.input, f.in.options_for(f.input));
  std::vector<HistogramRow> other_rows;
  if (!f.other.empty()) other_rows = read_histogram_file(f.other, f.in.options_for(f.other));

  std::vector<std::pair<const HistogramRow*, const HistogramRow*>> pairs;
  if (!f.other.empty()) {
    if (other_rows.size() != rows.size()) {
      throw InputError(f.other, 0, "has " + std::to_string(other_rows.size()) + " rows, input has " +
                                       std::to_string(rows.size()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) pairs.emplace_back(&rows[i], &other_rows[i]);
  } else if (f.pairs == "adjacent") {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) pairs.emplace_back(&rows[i], &rows[i + 1]);
  } else if (f.pairs == "all") {
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j) pairs.emplace_back(&rows[i], &rows[j]);
  } else {
    for (std::size_t i = 1; i < rows.size(); ++i) pairs.emplace_back(&rows[0], &rows[i]);
  }

  Report r = make_report(args, "compute");
  Json& config = r.json["config"];
  config["measure"] = measure ? Json(std::string(to_string(*measure))) : Json(nullptr);
  config["metric"] = spec ? metric_json(*spec) : Json(nullptr);
  config["sqrt"] = f.sqrt;
  config["input"] = f.input;
  config["other"] = f.other.empty() ? Json(nullptr) : Json(f.other);
  config["pairs"] = f.other.empty() ? f.pairs : "rowwise";
  config["input_options"] = f.in.to_json();

  for (const auto& [a, b] : pairs) {
    try {
      const double value = measure ? named_divergence(*measure, a->dist, b->dist)
                                   : family_divergence(spec->family, spec->s, a->dist, b->dist);
      Json row{{"p", a->id}, {"q", b->id}, {"value", value}};
      if (f.sqrt) row["sqrt"] = std::sqrt(std::max(0.0, value));
      r.json["results"].push_back(std::move(row));
    } catch (const Error& e) {
      throw InputError(f.other.empty() ? f.input : f.other, b->line, e.what());
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

struct VerifyFlags {
  std::string family = "both";
  std::string s_values = "-2:2:0.5";
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;
  unsigned threads = 0;

  // triangle
  std::uint64_t trials = 100000;
  std::string mode = "scalar";
  int simplex_n = 8;
  std::string range = "1e-3,1e3";
  double tol = 1e-9;
  bool no_sqrt = false;
  std::size_t max_witnesses = 16;

  // chain
  std::uint64_t pairs = 100000;
  int n_min = 2;
  int n_max = 32;
  double chain_tol = 1e-12;

  // probe
  std::size_t points = 10000;
  double t_min = 1e-2;
  double t_max = 1e2;

  // asymptotic
  std::string t_seq = "1e-1,1e-2,1e-3";
  std::string q = "0.2,0.8";
  std::string p0 = "0.5,0.5";
  double rel_tol = 0.01;
};

Report verify_triangle(const VerifyFlags& f, const std::vector<std::string>& args) {
  const auto range = parse_list(f.range, "range");
  if (range.size() != 2) throw Error(ErrorCode::InvalidConfig, "--range needs lo,hi");
  SamplerConfig cfg;
  cfg.seed = resolve_seed(f.seed_option, f.seed);
  cfg.lo = range[0];
  cfg.hi = range[1];
  cfg.simplex_n = f.simplex_n;
  cfg.trials = f.trials;
  cfg.mode = f.mode == "scalar" ? SampleMode::Scalar : SampleMode::Simplex;
  cfg.validate();
  TriangleOptions options;
  options.rooted = !f.no_sqrt;
  options.max_witnesses = f.max_witnesses;
  options.threads = f.threads;
  const auto families = parse_families(f.family);
  const auto s_values = parse_s_values(f.s_values);

  Report r = make_report(args, "verify triangle");
  r.json["seed"] = cfg.seed;
  r.json["config"] = Json{{"families", f.family},   {"s", s_list_json(s_values)},
                          {"mode", std::string(to_string(cfg.mode))},
                          {"trials", cfg.trials},   {"simplex_n", cfg.simplex_n},
                          {"range", {cfg.lo, cfg.hi}}, {"tol_rel", f.tol},
                          {"rooted", options.rooted}, {"max_witnesses", options.max_witnesses}};
  bool passed = true;
  for (Family family : families) {
    for (const SParam& s : s_values) {
      const auto result = triangle_search({family, s}, cfg, f.tol, options);
      passed = passed && result.passed();
      Json row{{"family", std::string(to_string(family))},
               {"s", s.value()},
               {"triples", result.triples},
               {"violations", result.violation_count},
               {"passed", result.passed()},
               {"worst", result.worst ? violation_json(*result.worst) : Json(nullptr)}};
      r.json["results"].push_back(std::move(row));
      for (const auto& w : result.witnesses) r.json["violations"].push_back(violation_json(w));
    }
  }
  r.json["passed"] = passed;
  r.exit_code = passed ? kSuccess : kVerificationFailed;
  return r;
}

Report verify_chain(const VerifyFlags& f, const std::vector<std::string>& args) {
  ChainSweepConfig cfg;
  cfg.seed = resolve_seed(f.seed_option, f.seed);
  cfg.pairs = f.pairs;
  cfg.n_min = f.n_min;
  cfg.n_max = f.n_max;
  cfg.tol_abs = f.chain_tol;
  cfg.threads = f.threads;
  const auto sweep = chain_sweep(cfg);

  const auto P = validate_distribution(parse_list(f.p0, "p0"));
  const auto Q = validate_distribution(parse_list(f.q, "q"));
  const auto fixture = chain_check(P, Q, cfg.tol_abs);
  Json values = Json::object();
  for (std::size_t k = 0; k < fixture.values.size(); ++k) values[std::string(kChainNames[k])] = fixture.values[k];

  Report r = make_report(args, "verify chain");
  r.json["seed"] = cfg.seed;
  r.json["config"] = Json{{"pairs", cfg.pairs}, {"n_min", cfg.n_min}, {"n_max", cfg.n_max},
                          {"tol_abs", cfg.tol_abs}, {"strict_threshold", cfg.strict_threshold},
                          {"p0", f.p0}, {"q", f.q}};
  r.json["results"].push_back(Json{{"sweep",
                                    {{"pairs", sweep.pairs},
                                     {"failures", sweep.failures},
                                     {"non_strict", sweep.non_strict},
                                     {"witness_trials", sweep.witnesses}}},
                                   {"fixture", {{"values", values}, {"passed", fixture.passed}}}});
  for (auto trial : sweep.witnesses) r.json["violations"].push_back(Json{{"trial", trial}});
  const bool passed = sweep.passed() && fixture.passed;
  r.json["passed"] = passed;
  r.exit_code = passed ? kSuccess : kVerificationFailed;
  return r;
}

Report verify_probe(const VerifyFlags& f, const std::vector<std::string>& args) {
  const auto grid = log_grid(f.t_min, f.t_max, f.points);
  const std::vector<double> betas = {2.0, 10.0, 100.0};
  const auto families = parse_families(f.family);
  const auto s_values = parse_s_values(f.s_values);

  Report r = make_report(args, "verify probe");
  r.json["config"] = Json{{"families", f.family}, {"s", s_list_json(s_values)}, {"points", f.points},
                          {"t_min", f.t_min}, {"t_max", f.t_max}, {"betas", betas}};
  bool passed = true;
  for (Family family : families) {
    for (const SParam& s : s_values) {
      const auto p = monotonicity_probe(family, s, grid, betas);
      passed = passed && p.passed();
      Json pair_sums = Json::array();
      for (const auto& ps : p.pair_sums) pair_sums.push_back(Json{{"beta", ps.beta}, {"sign_changes", ps.sign_changes}});
      r.json["results"].push_back(Json{{"family", std::string(to_string(family))},
                                       {"s", s.value()},
                                       {"derivative_negative", p.derivative_negative},
                                       {"max_derivative", p.max_derivative},
                                       {"sign_changes", p.sign_changes},
                                       {"bracket", {p.bracket_lo, p.bracket_hi}},
                                       {"brackets_one", p.brackets_one},
                                       {"n_at_one", p.n_at_one},
                                       {"h_sign_pattern", p.h_sign_pattern},
                                       {"pair_sums", pair_sums},
                                       {"passed", p.passed()}});
      if (!p.passed()) r.json["violations"].push_back(Json{{"family", std::string(to_string(family))}, {"s", s.value()}});
    }
  }
  r.json["passed"] = passed;
  r.exit_code = passed ? kSuccess : kVerificationFailed;
  return r;
}

Report verify_asymptotic(const VerifyFlags& f, const std::vector<std::string>& args) {
  const auto Q = validate_distribution(parse_list(f.q, "q"));
  const auto P0 = validate_distribution(parse_list(f.p0, "p0"));
  const auto t_seq = parse_list(f.t_seq, "t sequence");
  const auto families = parse_families(f.family);
  const auto s_values = parse_s_values(f.s_values);

  Report r = make_report(args, "verify asymptotic");
  r.json["config"] = Json{{"families", f.family}, {"s", s_list_json(s_values)}, {"t_seq", t_seq},
                          {"q", f.q}, {"p0", f.p0}, {"rel_tol", f.rel_tol}};
  bool passed = true;
  for (Family family : families) {
    for (const SParam& s : s_values) {
      const auto table = asymptotic_probe(family, s, Q, P0, t_seq);
      const bool ok = !table.rows.empty() && table.error_decreasing &&
                      table.rows.back().error <= f.rel_tol * table.limit;
      passed = passed && ok;
      Json rows = Json::array();
      for (const auto& row : table.rows) {
        rows.push_back(Json{{"t", row.t}, {"divergence", row.divergence}, {"chi2", row.chi2},
                            {"ratio", row.ratio}, {"error", row.error}});
      }
      r.json["results"].push_back(Json{{"family", std::string(to_string(family))},
                                       {"s", s.value()},
                                       {"limit", table.limit},
                                       {"rows", rows},
                                       {"error_decreasing", table.error_decreasing},
                                       {"first_within_one_percent", table.first_within_one_percent
                                                                        ? Json(*table.first_within_one_percent)
                                                                        : Json(nullptr)},
                                       {"passed", ok}});
      if (!ok) r.json["violations"].push_back(Json{{"family", std::string(to_string(family))}, {"s", s.value()}});
    }
  }
  r.json["passed"] = passed;
  r.exit_code = passed ? kSuccess : kVerificationFailed;
  return r;
}

// ---------------------------------------------------------------------------

struct IndexFlags {
  std::string input;
  std::string output;
  std::string index;
  std::string queries;
  std::string family;
  std::string s;
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;
  std::size_t k = 10;
  CLI::Option* radius_option = nullptr;
  double radius = 0.0;
  bool brute = false;
  InputFlags in;
};

Json index_to_json(const VPTree& tree) {
  Json points = Json::array();
  for (const auto& p : tree.points()) {
    points.push_back(Json{{"id", p.id}, {"weights", std::vector<double>(p.dist.weights().begin(), p.dist.weights().end())}});
  }
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) nodes.push_back(Json::array({n.point, n.radius, n.inner, n.outer}));
  Json metric = metric_json(tree.metric());
  metric["rooted"] = tree.rooted();
  return Json{{"format", kIndexFormat},     {"schema_version", kIndexSchemaVersion},
              {"metric", metric},           {"seed", tree.seed()},
              {"dimension", tree.dimension()}, {"root", tree.root()},
              {"points", points},           {"nodes", nodes}};
}

VPTree index_from_json(const Json& j, const std::string& path) {
  try {
    if (j.value("format", "") != kIndexFormat) throw Error(ErrorCode::SchemaMismatch, path + " is not a divmetric index");
    if (j.value("schema_version", -1) != kIndexSchemaVersion) {
      throw Error(ErrorCode::SchemaMismatch, path + ": unsupported schema version " + j["schema_version"].dump());
    }
    const auto family = parse_family(j.at("metric").at("family").get<std::string>());
    if (!family) throw Error(ErrorCode::SchemaMismatch, path + ": unknown family in index");
    const MetricSpec metric{*family, SParam(j.at("metric").at("s").get<double>())};
    const bool rooted = j.at("metric").value("rooted", true);

    std::vector<IndexedPoint> points;
    for (const auto& p : j.at("points")) {
      points.push_back({p.at("id").get<std::string>(), exact_distribution(p.at("weights").get<std::vector<double>>())});
    }
    std::vector<VPTree::Node> nodes;
    for (const auto& n : j.at("nodes")) {
      nodes.push_back({n.at(0).get<std::size_t>(), n.at(1).get<double>(), n.at(2).get<std::int64_t>(),
                       n.at(3).get<std::int64_t>()});
    }
    return VPTree::from_parts(std::move(points), metric, j.at("seed").get<std::uint64_t>(), std::move(nodes),
                              j.at("root").get<std::int64_t>(), rooted);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, path + ": malformed index: " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaMismatch) throw;
    throw Error(ErrorCode::SchemaMismatch, path + ": " + e.what());
  }
}

Report cmd_index_build(const IndexFlags& f, const std::vector<std::string>& args) {
  const auto family = parse_family(f.family);
  if (!family) throw Error(ErrorCode::InvalidConfig, "unknown family '" + f.family + "'");
  const MetricSpec metric{*family, parse_s(f.s)};
  const std::uint64_t seed = resolve_seed(f.seed_option, f.seed);

  auto rows = read_histogram_file(f.input, f.in.options_for(f.input));
  if (rows.empty()) throw InputError(f.input, 0, "no rows to index");
  std::vector<IndexedPoint> points;
  points.reserve(rows.size());
  const auto dimension = rows.front().dist.size();
  for (auto& row : rows) {
    if (row.dist.size() != dimension) {
      throw InputError(f.input, row.line, "row length differs from the first row");
    }
    points.push_back({std::move(row.id), std::move(row.dist)});
  }
  const VPTree tree = VPTree::build(std::move(points), metric, seed);

  std::ofstream out(f.output);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + f.output);
  out << index_to_json(tree).dump() << '\n';

  Report r = make_report(args, "index build");
  r.json["seed"] = seed;
  r.json["config"] = Json{{"input", f.input}, {"output", f.output}, {"metric", metric_json(metric)},
                          {"input_options", f.in.to_json()}};
  r.json["results"].push_back(Json{{"points", tree.size()}, {"dimension", tree.dimension()}, {"depth", tree.depth()}});
  return r;
}

Report cmd_index_query(const IndexFlags& f, const std::vector<std::string>& args) {
  std::ifstream in(f.index);
  if (!in) throw InputError(f.index, 0, "cannot open index");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaMismatch, f.index + ": invalid JSON: " + e.what());
  }
  const VPTree tree = index_from_json(j, f.index);

  if (!f.family.empty() || !f.s.empty()) {
    const auto family = f.family.empty() ? std::optional<Family>(tree.metric().family) : parse_family(f.family);
    if (!family) throw Error(ErrorCode::InvalidConfig, "unknown family '" + f.family + "'");
    const SParam s = f.s.empty() ? tree.metric().s : parse_s(f.s);
    if (!(MetricSpec{*family, s} == tree.metric())) {
      throw Error(ErrorCode::MetricMismatch, "index was built with family " + std::string(to_string(tree.metric().family)) +
                                                 ", s = " + std::to_string(tree.metric().s.value()));
    }
  }
  const bool by_radius = f.radius_option->count() > 0;
  if (!by_radius && f.k == 0) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");

  const auto queries = read_histogram_file(f.queries, f.in.options_for(f.queries));
  Report r = make_report(args, "index query");
  r.json["seed"] = tree.seed();
  r.json["config"] = Json{{"index", f.index},
                          {"queries", f.queries},
                          {"metric", metric_json(tree.metric())},
                          {"k", by_radius ? Json(nullptr) : Json(f.k)},
                          {"radius", by_radius ? Json(f.radius) : Json(nullptr)},
                          {"brute", f.brute},
                          {"input_options", f.in.to_json()}};

  std::size_t evaluations = 0;
  for (const auto& q : queries) {
    QueryResult result;
    try {
      if (f.brute) {
        result = by_radius ? brute_force_range(tree.points(), q.dist, f.radius, tree.metric(), tree.rooted())
                           : brute_force_knn(tree.points(), q.dist, f.k, tree.metric(), tree.rooted());
      } else {
        result = by_radius ? tree.range(q.dist, f.radius) : tree.knn(q.dist, f.k);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LengthMismatch) throw;
      throw InputError(f.queries, q.line, e.what());
    }
    evaluations += result.distance_evaluations;
    r.json["results"].push_back(Json{{"query", q.id},
                                     {"neighbors", neighbors_json(result.neighbors)},
                                     {"distance_evaluations", result.distance_evaluations}});
  }
  const double mean = queries.empty() ? 0.0 : static_cast<double>(evaluations) / static_cast<double>(queries.size());
  r.json["summary"] = Json{{"queries", queries.size()},
                           {"points", tree.size()},
                           {"mean_distance_evaluations", mean},
                           {"evaluation_ratio", mean / static_cast<double>(tree.size())}};
  return r;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::MetricMismatch:
    case ErrorCode::InvalidGenerator:
    case ErrorCode::DegenerateDirection:
      return kUsageError;
    default:
      return kInputError;
  }
}

}  // namespace

SParam parse_s(std::string_view text) { return checked_s(parse_double(text, "s")); }

std::vector<SParam> parse_s_values(std::string_view text) {
  std::vector<SParam> values;
  if (text.find(':') == std::string_view::npos) {
    for (auto part : split(text, ',')) values.push_back(parse_s(part));
    return values;
  }
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw Error(ErrorCode::InvalidConfig, "s grid must be lo:hi:step");
  const double lo = parse_double(parts[0], "grid start");
  const double hi = parse_double(parts[1], "grid end");
  const double step = parse_double(parts[2], "grid step");
  if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::InvalidConfig, "s grid needs lo <= hi and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + kGridTolerance)) + 1;
  if (count > 100000) throw Error(ErrorCode::InvalidConfig, "s grid has too many points");
  for (std::size_t i = 0; i < count; ++i) {
    double v = lo + static_cast<double>(i) * step;
    for (double snap : {0.0, 1.0, hi}) {
      if (std::abs(v - snap) <= kGridTolerance) v = snap;
    }
    values.push_back(checked_s(v));
  }
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symmetric divergence families, their square-root metrics and a metric index", "divmetric"};
  app.require_subcommand(1);
  bool timing = false;
  app.add_flag("--timing", timing, "Record wall time in the report (makes reports non-reproducible)");

  std::optional<Report> report;
  auto start = std::chrono::steady_clock::now();

  // compute
  ComputeFlags cf;
  auto* compute = app.add_subcommand("compute", "Evaluate a divergence on pairs of histogram rows");
  compute->add_option("--measure", cf.measure, "Named measure: triangular, jensen-shannon, arith-geo, hellinger, d, j-divergence, sym-chi2, chi2");
  compute->add_option("--family", cf.family, "Parametric family: ag or j");
  compute->add_option("--s", cf.s, "Family parameter");
  compute->add_flag("--sqrt", cf.sqrt, "Also report the square root");
  compute->add_option("--input", cf.input, "Histogram file")->required();
  compute->add_option("--other", cf.other, "Second file; pairs row i with row i");
  compute->add_option("--pairs", cf.pairs, "Pair selection within --input")->check(CLI::IsMember({"adjacent", "all", "first"}));
  cf.in.attach(compute);
  compute->callback([&] { report = cmd_compute(cf, args); });

  // verify
  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("--family", vf.family, "ag, j or both")->check(CLI::IsMember({"ag", "j", "both"}));
    sub->add_option("--s-grid,--s", vf.s_values, "lo:hi:step or a comma list");
    sub->add_option("--threads", vf.threads, "Worker threads (0 = all cores); results do not depend on it");
  };
  auto seeded = [&](CLI::App* sub) {
    vf.seed_option = sub->add_option("--seed", vf.seed, "Random seed (default: $DIVMETRIC_SEED or 0)");
  };

  auto* triangle = verify->add_subcommand("triangle", "Randomised triangle-inequality search");
  common(triangle);
  seeded(triangle);
  triangle->add_option("--trials", vf.trials, "Triples per (family, s)");
  triangle->add_option("--mode", vf.mode, "scalar or simplex")->check(CLI::IsMember({"scalar", "simplex"}));
  triangle->add_option("--n", vf.simplex_n, "Simplex dimension");
  triangle->add_option("--range", vf.range, "Scalar range lo,hi (log-uniform)");
  triangle->add_option("--tol", vf.tol, "Relative tolerance");
  triangle->add_flag("--no-sqrt", vf.no_sqrt, "Use the raw divergence as the distance");
  triangle->add_option("--max-witnesses", vf.max_witnesses, "Witnesses kept per (family, s)");
  triangle->callback([&] { report = verify_triangle(vf, args); });

  auto* chain = verify->add_subcommand("chain", "Inequality chain Delta/4 <= I <= h <= 4d <= J/8 <= T <= Psi/16");
  seeded(chain);
  chain->add_option("--pairs", vf.pairs, "Random pairs");
  chain->add_option("--n-min", vf.n_min, "Smallest dimension");
  chain->add_option("--n-max", vf.n_max, "Largest dimension");
  chain->add_option("--tol", vf.chain_tol, "Absolute slack");
  chain->add_option("--threads", vf.threads, "Worker threads");
  chain->add_option("--p", vf.p0, "Fixture P");
  chain->add_option("--q", vf.q, "Fixture Q");
  chain->callback([&] { report = verify_chain(vf, args); });

  auto* probe = verify->add_subcommand("probe", "Monotonicity and sign probes of the n-functions");
  common(probe);
  probe->add_option("--points", vf.points, "Log-spaced grid size");
  probe->add_option("--t-min", vf.t_min, "Grid start");
  probe->add_option("--t-max", vf.t_max, "Grid end");
  probe->callback([&] { report = verify_probe(vf, args); });

  auto* asymptotic = verify->add_subcommand("asymptotic", "Divergence / chi2 ratio along P_t = Q + t (P0 - Q)");
  common(asymptotic);
  asymptotic->add_option("--t-seq", vf.t_seq, "Decreasing t values");
  asymptotic->add_option("--q", vf.q, "Base distribution Q");
  asymptotic->add_option("--p0", vf.p0, "Direction endpoint P0");
  asymptotic->add_option("--rel-tol", vf.rel_tol, "Allowed relative error at the last t");
  asymptotic->callback([&] { report = verify_asymptotic(vf, args); });

  // index
  IndexFlags xf;
  auto* index = app.add_subcommand("index", "Build or query a vantage-point tree");
  index->require_subcommand(1);
  auto* build = index->add_subcommand("build", "Build an index file");
  build->add_option("--input", xf.input, "Histogram file")->required();
  build->add_option("--output", xf.output, "Index file to write")->required();
  build->add_option("--family", xf.family, "ag or j")->required();
  build->add_option("--s", xf.s, "Family parameter")->required();
  xf.seed_option = build->add_option("--seed", xf.seed, "Vantage selection seed (default: $DIVMETRIC_SEED or 0)");
  xf.in.attach(build);
  build->callback([&] { report = cmd_index_build(xf, args); });

  auto* query = index->add_subcommand("query", "Query an index file");
  query->add_option("--index", xf.index, "Index file")->required();
  query->add_option("--queries", xf.queries, "Histogram file of queries")->required();
  query->add_option("--k", xf.k, "Neighbours per query");
  xf.radius_option = query->add_option("--radius", xf.radius, "Range query radius instead of k-NN");
  query->add_option("--family", xf.family, "Expected family (checked against the index)");
  query->add_option("--s", xf.s, "Expected s (checked against the index)");
  query->add_flag("--brute", xf.brute, "Answer by linear scan instead of the tree");
  xf.in.attach(query);
  query->callback([&] { report = cmd_index_query(xf, args); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  if (!report) return kUsageError;

  if (timing) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report->json["timing"] = Json{{"wall_seconds", elapsed.count()}};
  }
  out << report->json.dump(2) << '\n';
  return report->exit_code;
}

}  // namespace divmetric::cli
