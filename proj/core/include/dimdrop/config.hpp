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

#include <cstdint>

#include "dimdrop/errors.hpp"

namespace dimdrop {

// Single configuration record every tolerance and grid size flows from.
// Pipelines never invent ad-hoc epsilons; they read them from here so that a
// report fully determines the run.
struct RunConfig {
  // Point tolerances (matrix-level predicates, endpoint structure, gluing).
  double tol = 1e-9;
  double boundary_tol = 1e-9;
  double glue_tol = 1e-9;

  // Unitary-log branch guard: eigen-phases must stay this far from +-pi.
  double branch_margin = 1e-6;

  // Family (2-parameter homotopy) budgets. Slices come out of long products,
  // so they get a slightly looser budget than single matrix predicates.
  double family_tol = 1e-8;
  double endpoint_tol = 1e-8;

  // Continuity is certified against a Lipschitz budget, not asserted in the
  // analytic sense: per-step t-jumps must stay below lipschitz_t / grid_t,
  // per-step s-jumps below lipschitz_s / (stage slice count - 1). Both act
  // as total arc-length budgets per direction; the s grids are coarse (a
  // handful of slices per stage), so the s budget is per-stage.
  double lipschitz_t = 128.0;
  double lipschitz_s = 32.0;

  int grid_t = 256;  // time resolution T (samples T+1); must be even
  int grid_g = 256;  // circle resolution G
  int grid_s = 24;   // total family slice budget across a pipeline's stages

  std::uint64_t seed = 0;

  void validate() const {
    if (grid_t < 8 || grid_t % 2 != 0) {
      throw ConfigError("grid_t must be even and >= 8");
    }
    if (grid_g < 8) throw ConfigError("grid_g must be >= 8");
    if (grid_s < 4) throw ConfigError("grid_s must be >= 4");
    if (tol <= 0 || boundary_tol <= 0 || glue_tol <= 0 || family_tol <= 0 ||
        endpoint_tol <= 0 || branch_margin <= 0) {
      throw ConfigError("tolerances must be positive");
    }
    if (lipschitz_t <= 0 || lipschitz_s <= 0) {
      throw ConfigError("Lipschitz budgets must be positive");
    }
  }
};

}  // namespace dimdrop
