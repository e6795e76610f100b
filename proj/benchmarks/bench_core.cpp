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
//
// Microbenchmarks for the hot paths: elementary map evaluation, the
// winding oracle, and the basic map assembly.

#include <benchmark/benchmark.h>

#include "dimdrop/algebra.hpp"
#include "dimdrop/families.hpp"
#include "dimdrop/homotopy.hpp"
#include "dimdrop/ktheory.hpp"
#include "dimdrop/rng.hpp"

namespace {

using namespace dimdrop;

void BM_ElementaryEval(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const ElementaryMap map(PathSequence::standard(degree, 256));
  SeededRng rng(7);
  const AlgebraElement u =
      sample_unitary(BaseAlgebra::circle_loops(1, 64), 1, rng);
  int t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.eval(u, t));
    t = (t + 17) % 257;
  }
}
BENCHMARK(BM_ElementaryEval)->Arg(2)->Arg(3)->Arg(5);

void BM_DetWinding(benchmark::State& state) {
  const int grid = static_cast<int>(state.range(0));
  const AlgebraElement loop =
      winding_loop(BaseAlgebra::circle_loops(3, grid), 1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(det_winding(loop.fibers()));
  }
}
BENCHMARK(BM_DetWinding)->Arg(64)->Arg(256);

void BM_BasicMapEval(benchmark::State& state) {
  RunConfig cfg;
  cfg.grid_t = static_cast<int>(state.range(0));
  cfg.grid_g = 16;
  const BasicMapSpec spec = BasicMapSpec::standard(1, 2, 3, cfg.grid_t);
  SeededRng rng(11);
  const AlgebraElement u =
      sample_unitary(BaseAlgebra::circle_loops(1, 16), 1, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(basic_map_eval(spec, u, cfg));
  }
}
BENCHMARK(BM_BasicMapEval)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
