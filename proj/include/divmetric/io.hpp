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

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "divmetric/distribution.hpp"

namespace divmetric {

enum class HistogramFormat { Csv, Jsonl };

/// Malformed or invalid input data, tagged with its source and line.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct HistogramRow {
  std::string id;
  Distribution<double> dist;
  std::size_t line;
};

struct HistogramReadOptions {
  HistogramFormat format = HistogramFormat::Csv;
  /// CSV only: the first field of each row is an identifier.
  bool id_column = false;
  ValidationOptions validation;
};

/// Reads one distribution per non-blank line. CSV lines are comma-separated
/// masses ('#' starts a comment line). JSONL lines are either an array of
/// masses or an object {"id": ..., "weights": [...]}. Rows without an id get
/// their zero-based row index. Every row is validated; the first bad row
/// throws InputError.
std::vector<HistogramRow> read_histograms(std::istream& in, const HistogramReadOptions& options,
                                          const std::string& source = "<input>");

std::vector<HistogramRow> read_histogram_file(const std::string& path, const HistogramReadOptions& options);

/// .jsonl / .ndjson select JSON lines, anything else CSV.
HistogramFormat format_from_path(const std::string& path);

}  // namespace divmetric
