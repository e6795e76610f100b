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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimdrop/algebra.hpp"
#include "dimdrop/config.hpp"

namespace dimdrop {

// Per-stage evidence for a discrete homotopy. A stage is a contiguous run of
// family slices; all defects are maxima over that run. Nothing here depends
// on wall-clock anything — reports must be byte-identical across reruns.
struct StageVerdict {
  std::string name;
  double max_unitarity_defect = 0.0;
  // Worst endpoint-structure defect over slices (tensor-form recovery).
  double max_boundary_defect = 0.0;
  // Worst jump between consecutive slices (s-direction) and within a slice
  // (t-direction).
  double max_step_jump_s = 0.0;
  double max_step_jump_t = 0.0;
  // Distance of the stage's first/last slice from its contracted endpoints;
  // negative means "not applicable on this side".
  double endpoint_defect_first = -1.0;
  double endpoint_defect_last = -1.0;
  bool endpoints_ok = true;
  bool slices_valid = true;
  // Determinant-winding evidence, tracked on circle bases only.
  bool winding_checked = false;
  bool winding_constant = true;
  long long winding_value = 0;
  // Number of slices pushed during this stage; the s-jump budget is
  // per-stage, lipschitz_s / (slice_count - 1).
  int slice_count = 0;
};

struct CertParams {
  int k = 1;
  int m = 1;
  int n = 1;
  BaseAlgebra base;
  int grid_t = 0;
  int grid_g = 0;
  int grid_s = 0;
  std::uint64_t seed = 0;
};

struct HomotopyCertificate {
  std::string name;
  CertParams params;
  std::vector<StageVerdict> stages;
  bool pass = false;
};

// Report emitted by the K-theory pipelines; extends the homotopy evidence
// with class bookkeeping.
struct PipelineReport {
  std::string name;
  CertParams params;
  std::vector<StageVerdict> stages;
  // Winding classes before and after correction: [c_p, c_q, c_p', c_q'].
  std::vector<long long> corner_classes;
  std::array<long long, 2> bezout{0, 0};
  double conjugation_defect = 0.0;
  bool pass = false;
};

// Evaluates the stage ledger against the configured budgets. Used by the
// builders right before they freeze `pass`.
bool stages_pass(const std::vector<StageVerdict>& stages,
                 const RunConfig& cfg);

// ---------------------------------------------------------------------------
// FamilyCertifier: streaming accumulator for two-parameter families.
//
// Pipelines push slices left to right; the certifier keeps only the previous
// slice, so a full family never has to be held in memory. Each slice is
// checked for unitarity, dimension drop endpoint structure, and (on circle
// bases) constancy of the fixed-t determinant winding.
// ---------------------------------------------------------------------------

class FamilyCertifier {
 public:
  // m, n: dimension drop shape the slices must respect; track_winding only
  // has an effect on circle bases.
  FamilyCertifier(int m, int n, const RunConfig& cfg, bool track_winding);

  void begin_stage(const std::string& name);
  void add_slice(const GridPath& slice);
  // Registers the contracted endpoint for the current stage boundary; call
  // right after begin_stage (first) or before end_stage (last).
  void expect_first(const GridPath& endpoint);
  void expect_last(const GridPath& endpoint);
  void end_stage();

  const std::vector<StageVerdict>& stages() const { return stages_; }
  std::vector<StageVerdict> take_stages() { return std::move(stages_); }

 private:
  void check_slice_windings(const GridPath& slice);

  int m_;
  int n_;
  RunConfig cfg_;
  bool track_winding_;
  std::vector<StageVerdict> stages_;
  StageVerdict current_;
  bool stage_open_ = false;
  bool have_previous_ = false;
  GridPath previous_;
  bool have_reference_winding_ = false;
  long long reference_winding_ = 0;
  std::optional<GridPath> pending_first_;
  std::optional<GridPath> pending_last_;
};

}  // namespace dimdrop
