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

#include "dimdrop/certificate.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "dimdrop/errors.hpp"
#include "dimdrop/ktheory.hpp"
#include "dimdrop/parallel.hpp"

namespace dimdrop {

bool stages_pass(const std::vector<StageVerdict>& stages,
                 const RunConfig& cfg) {
  if (stages.empty()) return false;
  const double budget_t = cfg.lipschitz_t / static_cast<double>(cfg.grid_t);
  for (const StageVerdict& stage : stages) {
    if (!stage.slices_valid || !stage.endpoints_ok) return false;
    if (stage.max_unitarity_defect > cfg.family_tol) return false;
    if (stage.max_boundary_defect > cfg.family_tol) return false;
    if (stage.max_step_jump_t > budget_t) return false;
    if (stage.slice_count > 1) {
      const double budget_s =
          cfg.lipschitz_s / static_cast<double>(stage.slice_count - 1);
      if (stage.max_step_jump_s > budget_s) return false;
    }
    if (stage.winding_checked && !stage.winding_constant) return false;
  }
  return true;
}

FamilyCertifier::FamilyCertifier(int m, int n, const RunConfig& cfg,
                                 bool track_winding)
    : m_(m), n_(n), cfg_(cfg), track_winding_(track_winding) {
  if (m < 1 || n < 1) {
    throw ConfigError("certifier needs positive dimension drop shape");
  }
}

void FamilyCertifier::begin_stage(const std::string& name) {
  if (stage_open_) {
    throw PreconditionError("begin_stage while a stage is open: " + name);
  }
  current_ = StageVerdict{};
  current_.name = name;
  pending_first_.reset();
  pending_last_.reset();
  stage_open_ = true;
}

void FamilyCertifier::expect_first(const GridPath& endpoint) {
  if (!stage_open_ || current_.slice_count != 0) {
    throw PreconditionError("expect_first must follow begin_stage directly");
  }
  pending_first_ = endpoint;
}

void FamilyCertifier::expect_last(const GridPath& endpoint) {
  if (!stage_open_) {
    throw PreconditionError("expect_last outside of a stage");
  }
  pending_last_ = endpoint;
}

void FamilyCertifier::check_slice_windings(const GridPath& slice) {
  // det(slice(t)) has the same winding for every t on a valid homotopy
  // slice, and that winding must also be constant across slices and stages;
  // we certify the strongest form and record one number.
  const int samples = slice.sample_count();
  std::vector<long long> windings(samples, 0);
  par::parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    windings[i] = det_winding(slice.sample(static_cast<int>(i)).fibers());
  });
  for (long long w : windings) {
    if (!have_reference_winding_) {
      reference_winding_ = w;
      have_reference_winding_ = true;
    } else if (w != reference_winding_) {
      current_.winding_constant = false;
    }
  }
  current_.winding_checked = true;
  current_.winding_value = reference_winding_;
}

void FamilyCertifier::add_slice(const GridPath& slice) {
  if (!stage_open_) {
    throw PreconditionError("add_slice outside of a stage");
  }
  current_.max_unitarity_defect =
      std::max(current_.max_unitarity_defect, slice.max_unitarity_defect());

  const DdCheckResult dd = dd_check(slice, m_, n_, cfg_.family_tol);
  current_.slices_valid = current_.slices_valid && dd.ok;
  current_.max_boundary_defect = std::max(
      current_.max_boundary_defect, std::max(dd.defect_a, dd.defect_b));

  current_.max_step_jump_t =
      std::max(current_.max_step_jump_t, slice.max_step_jump());
  if (have_previous_) {
    current_.max_step_jump_s =
        std::max(current_.max_step_jump_s, previous_.distance(slice));
  }

  if (current_.slice_count == 0 && pending_first_.has_value()) {
    current_.endpoint_defect_first = slice.distance(*pending_first_);
  }

  if (track_winding_ && slice.base().is_circle()) {
    check_slice_windings(slice);
  }

  ++current_.slice_count;
  previous_ = slice;
  have_previous_ = true;
}

void FamilyCertifier::end_stage() {
  if (!stage_open_) {
    throw PreconditionError("end_stage without an open stage");
  }
  if (current_.slice_count == 0) {
    current_.slices_valid = false;
  } else if (pending_last_.has_value()) {
    current_.endpoint_defect_last = previous_.distance(*pending_last_);
  }
  const bool first_ok = current_.endpoint_defect_first < 0.0 ||
                        current_.endpoint_defect_first <= cfg_.endpoint_tol;
  const bool last_ok = current_.endpoint_defect_last < 0.0 ||
                       current_.endpoint_defect_last <= cfg_.endpoint_tol;
  current_.endpoints_ok = first_ok && last_ok;
  stages_.push_back(std::move(current_));
  stage_open_ = false;
}

}  // namespace dimdrop
