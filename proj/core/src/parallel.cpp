// Copyright 2026 The dimdrop Authors
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

#include "dimdrop/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>
#include <vector>

namespace dimdrop::par {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = use hardware concurrency

int effective_threads(std::size_t n) {
  int configured = g_max_threads.load();
  if (configured <= 0) {
    configured = static_cast<int>(std::thread::hardware_concurrency());
    if (configured <= 0) configured = 1;
  }
  const std::size_t per_thread_floor = 16;  // don't spawn for tiny loops
  const std::size_t cap = std::max<std::size_t>(1, n / per_thread_floor);
  return static_cast<int>(std::min<std::size_t>(configured, cap));
}
}  // namespace

int max_threads() { return effective_threads(std::numeric_limits<int>::max()); }

void set_max_threads(int count) { g_max_threads.store(count); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const int threads = effective_threads(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

double parallel_max(std::size_t n,
                    const std::function<double(std::size_t)>& body) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const int threads = effective_threads(n);
  if (threads <= 1) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, body(i));
    return best;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<double> partial(threads,
                              -std::numeric_limits<double>::infinity());
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, &partial, t, begin, end] {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = begin; i < end; ++i) best = std::max(best, body(i));
      partial[t] = best;
    });
  }
  for (auto& th : pool) th.join();
  double best = -std::numeric_limits<double>::infinity();
  for (double v : partial) best = std::max(best, v);
  return best;
}

}  // namespace dimdrop::par
