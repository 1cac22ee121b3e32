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
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace divmetric::detail {

/// Splits [0, total) into fixed-size chunks and runs `work(begin, end)` for
/// each on a small thread pool. Returns the per-chunk results in chunk order,
/// so any fold over them is independent of scheduling.
template <typename Result, typename Work>
std::vector<Result> run_chunked(std::uint64_t total, std::uint64_t chunk, unsigned threads, Work work) {
  const std::uint64_t chunks = (total + chunk - 1) / chunk;
  std::vector<Result> results(chunks);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));

  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const std::uint64_t begin = c * chunk;
      results[c] = work(begin, std::min(total, begin + chunk));
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  return results;
}

}  // namespace divmetric::detail
