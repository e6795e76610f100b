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

#include <vector>

#include "dimdrop/matrix.hpp"

namespace dimdrop {

// Distance between two angles on R / 2*pi*Z, in [0, pi].
double circular_distance(double a, double b);

// Eigenphase tracks of a discrete path of unitaries: phases[s][l] is the
// unwrapped (continuously lifted) phase of track l at sample s, and
// vectors[s] holds the matching eigenvectors as columns in track order.
struct PhaseTracks {
  std::vector<RVec> phases;
  std::vector<CMat> vectors;
};

// Unwraps eigenphases along a discrete path of unitaries. Sample 0 uses
// principal phases in (-pi, pi]. Each later sample is matched greedily to
// the previous tracks by circular distance; any matched step of at least
// `ambiguity` radians means the grid cannot distinguish branch choices and
// raises UnwrapFailureError.
PhaseTracks unwrap_path(const std::vector<CMat>& samples, double ambiguity);

// As unwrap_path for a periodic loop: samples[G] is implicitly samples[0].
// After going around, the reconstructed logarithm must return to its start
// within closure_tol (in operator norm); a residual branch shift of 2*pi
// shows up as a closure defect of that size and raises UnwrapFailureError.
PhaseTracks unwrap_loop(const std::vector<CMat>& samples, double ambiguity,
                        double closure_tol);

// Skew-Hermitian logarithms L_s = V_s diag(i * phase_s) V_s^* rebuilt from
// tracks, so that exp(L_s) recovers the input samples.
std::vector<CMat> tracks_to_logs(const PhaseTracks& tracks);

}  // namespace dimdrop
