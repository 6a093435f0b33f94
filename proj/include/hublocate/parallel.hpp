// Copyright 2026 The hublocate Authors
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
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hublocate {

// Worker count for a requested value; 0 means all available cores.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, n) into at most `threads` contiguous blocks and runs
// fn(block, begin, end) for each. Blocks are numbered in index order.
// Returns the number of blocks used.
inline int parallel_blocks(
    std::size_t n, int threads,
    const std::function<void(int, std::size_t, std::size_t)>& fn) {
  const int workers = static_cast<int>(
      std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), n)));
  if (workers == 1) {
    fn(0, 0, n);
    return 1;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = n / workers;
  const std::size_t extra = n % workers;
  std::size_t begin = 0;
  for (int w = 0; w < workers; ++w) {
    const std::size_t end = begin + chunk + (static_cast<std::size_t>(w) < extra ? 1 : 0);
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return workers;
}

}  // namespace hublocate
