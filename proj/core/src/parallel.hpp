// core/src/parallel.hpp

// Copyright 2026  The derev Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEREV_SRC_PARALLEL_HPP_
#define DEREV_SRC_PARALLEL_HPP_

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace derev {

// Runs fn(i) for i in [0, count) on `threads` workers with a static
// stride partition. Each index must touch disjoint state, so the result
// is identical to a sequential loop. The first exception thrown by any
// worker is rethrown.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  threads = std::min(threads, count);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace derev

#endif  // DEREV_SRC_PARALLEL_HPP_
