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

#pragma once

#include <cstddef>
#include <functional>

namespace dimdrop::par {

// Fiberwise/samplewise work in this library is embarrassingly parallel: each
// index writes its own slot, and the only cross-index reductions are max and
// all-of, which are order-free. Results are therefore identical for any
// thread count or chunking.

int max_threads();
void set_max_threads(int count);  // count <= 1 forces serial execution

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// max of body(i) over i in [0, n); returns -inf for n == 0.
double parallel_max(std::size_t n,
                    const std::function<double(std::size_t)>& body);

}  // namespace dimdrop::par
