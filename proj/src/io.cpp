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

#include "divmetric/io.hpp"

#include <charconv>
#include <fstream>
#include <string_view>

#include "json.hpp"

#include "divmetric/errors.hpp"

namespace divmetric {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, const std::string& source, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw InputError(source, line, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

struct RawRow {
  std::string id;
  std::vector<double> masses;
};

RawRow parse_csv(std::string_view text, bool id_column, const std::string& source, std::size_t line) {
  RawRow row;
  bool first = true;
  for (;;) {
    const auto comma = text.find(',');
    const auto field = text.substr(0, comma);
    if (first && id_column) {
      row.id = std::string(trim(field));
      if (row.id.empty()) throw InputError(source, line, "empty id field");
    } else {
      row.masses.push_back(parse_number(field, source, line));
    }
    first = false;
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return row;
}

RawRow parse_jsonl(std::string_view text, const std::string& source, std::size_t line) {
  using nlohmann::json;
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source, line, std::string("invalid JSON: ") + e.what());
  }
  RawRow row;
  const json* weights = &value;
  if (value.is_object()) {
    if (value.contains("id")) {
      const auto& id = value["id"];
      row.id = id.is_string() ? id.get<std::string>() : id.dump();
    }
    if (!value.contains("weights")) throw InputError(source, line, "object row needs a \"weights\" array");
    weights = &value["weights"];
  }
  if (!weights->is_array()) throw InputError(source, line, "expected an array of masses");
  for (const auto& x : *weights) {
    if (!x.is_number()) throw InputError(source, line, "non-numeric mass " + x.dump());
    row.masses.push_back(x.get<double>());
  }
  return row;
}

}  // namespace

HistogramFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    const auto ext = path.substr(dot);
    if (ext == ".jsonl" || ext == ".ndjson") return HistogramFormat::Jsonl;
  }
  return HistogramFormat::Csv;
}

std::vector<HistogramRow> read_histograms(std::istream& in, const HistogramReadOptions& options,
                                          const std::string& source) {
  std::vector<HistogramRow> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto body = trim(text);
    if (body.empty() || (options.format == HistogramFormat::Csv && body.front() == '#')) continue;
    RawRow raw = options.format == HistogramFormat::Csv ? parse_csv(body, options.id_column, source, line)
                                                        : parse_jsonl(body, source, line);
    if (raw.id.empty()) raw.id = std::to_string(rows.size());
    try {
      rows.push_back({std::move(raw.id), validate_distribution(raw.masses, options.validation), line});
    } catch (const Error& e) {
      throw InputError(source, line, e.what());
    }
  }
  return rows;
}

std::vector<HistogramRow> read_histogram_file(const std::string& path, const HistogramReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open file");
  return read_histograms(in, options, path);
}

}  // namespace divmetric
