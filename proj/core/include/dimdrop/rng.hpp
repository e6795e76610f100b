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
#include <random>

#include "dimdrop/matrix.hpp"

namespace dimdrop {

// Seeded random source with a fully specified output stream: mt19937_64 is
// pinned by the standard, and the uniform/normal transforms below avoid
// std::*_distribution (whose streams are implementation-defined). Reports
// built from the same seed are byte-identical across toolchains.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();

  // Standard normal via Box-Muller.
  double normal();

  cplx normal_complex();

  // Entries (N(0,1) + i N(0,1)) / sqrt(dim).
  CMat gaussian_matrix(Eigen::Index dim);

  // Skew-Hermitian part of a gaussian matrix.
  CMat random_skew(Eigen::Index dim);

  // Haar-ish random unitary: exp of a random skew-Hermitian matrix.
  CMat random_unitary(Eigen::Index dim);

  // Same, but with the skew generator's eigen-phases rescaled into
  // (-phase_bound, phase_bound) so the unitary log is branch-safe.
  CMat random_unitary_bounded(Eigen::Index dim, double phase_bound);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dimdrop
