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

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "divmetric/sparam.hpp"

namespace divmetric::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
  kInputError = 3,
};

/// Runs the command line `args` (without the program name). The JSON report
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a family parameter. Values within 1e-6 of 0 or 1 are refused
/// unless they are exactly 0 or 1, so a limit is never taken by accident.
SParam parse_s(std::string_view text);

/// "lo:hi:step" with inclusive endpoints (within 1e-12), or a comma list.
std::vector<SParam> parse_s_values(std::string_view text);

}  // namespace divmetric::cli
