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

#include "dimdrop/rng.hpp"

#include <cmath>
#include <numbers>

namespace dimdrop {

double SeededRng::uniform() {
  // Top 53 bits of the engine output, scaled to [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - uniform() lies in (0, 1], keeping the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

cplx SeededRng::normal_complex() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im);
}

CMat SeededRng::gaussian_matrix(Eigen::Index dim) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  CMat out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      out(i, j) = scale * normal_complex();
    }
  }
  return out;
}

CMat SeededRng::random_skew(Eigen::Index dim) {
  CMat g = gaussian_matrix(dim);
  return 0.5 * (g - g.adjoint().eval());
}

CMat SeededRng::random_unitary(Eigen::Index dim) {
  return exp_skew(random_skew(dim));
}

CMat SeededRng::random_unitary_bounded(Eigen::Index dim, double phase_bound) {
  CMat skew = random_skew(dim);
  CMat herm = cplx(0.0, -1.0) * skew;
  herm = 0.5 * (herm + herm.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<CMat> solver(herm);
  RVec vals = solver.eigenvalues();
  const double top = vals.cwiseAbs().maxCoeff();
  if (top >= phase_bound && top > 0.0) {
    // Rescale the whole spectrum; cheaper and smoother than clamping single
    // phases, and it keeps the eigenbasis untouched.
    vals *= (phase_bound * (1.0 - 1e-9)) / top;
  }
  CVec diag(dim);
  for (Eigen::Index i = 0; i < dim; ++i) diag(i) = std::polar(1.0, vals(i));
  return solver.eigenvectors() * diag.asDiagonal() *
         solver.eigenvectors().adjoint();
}

}  // namespace dimdrop
