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

#include "dimdrop/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "dimdrop/errors.hpp"
#include "dimdrop/parallel.hpp"

namespace dimdrop {

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::kScalars:
      return "scalars";
    case BaseKind::kMatrices:
      return "matrices";
    case BaseKind::kCircleLoops:
      return "circle";
  }
  return "unknown";
}

BaseAlgebra BaseAlgebra::scalars() { return BaseAlgebra{}; }

BaseAlgebra BaseAlgebra::matrices(int n) {
  if (n < 1) throw ConfigError("matrix base needs fiber size >= 1");
  return BaseAlgebra{BaseKind::kMatrices, n, 0};
}

BaseAlgebra BaseAlgebra::circle_loops(int n, int grid) {
  if (n < 1) throw ConfigError("circle base needs fiber size >= 1");
  if (grid < 8) throw ConfigError("circle base needs grid >= 8");
  return BaseAlgebra{BaseKind::kCircleLoops, n, grid};
}

double BaseAlgebra::angle(int g) const {
  return 2.0 * std::numbers::pi * static_cast<double>(g) /
         static_cast<double>(sample_count());
}

// ---------------------------------------------------------------------------
// AlgebraElement
// ---------------------------------------------------------------------------

AlgebraElement::AlgebraElement(BaseAlgebra base, int amp,
                               std::vector<CMat> fibers)
    : base_(base), amp_(amp), fibers_(std::move(fibers)) {
  if (amp_ < 1) throw DimensionMismatchError("amplification must be >= 1");
  if (static_cast<int>(fibers_.size()) != base_.sample_count()) {
    throw DimensionMismatchError("fiber count does not match the base");
  }
  const int d = base_.dim(amp_);
  for (const CMat& f : fibers_) {
    if (f.rows() != d || f.cols() != d) {
      throw DimensionMismatchError("fiber dimension does not match amp * N");
    }
  }
}

AlgebraElement AlgebraElement::identity(const BaseAlgebra& base, int amp) {
  return constant(base, amp, dimdrop::identity(base.dim(amp)));
}

AlgebraElement AlgebraElement::zero(const BaseAlgebra& base, int amp) {
  return constant(base, amp, zero_matrix(base.dim(amp)));
}

AlgebraElement AlgebraElement::constant(const BaseAlgebra& base, int amp,
                                        const CMat& value) {
  std::vector<CMat> fibers(base.sample_count(), value);
  return AlgebraElement(base, amp, std::move(fibers));
}

AlgebraElement AlgebraElement::from_fibers(
    const BaseAlgebra& base, int amp, const std::function<CMat(int)>& fn) {
  std::vector<CMat> fibers;
  fibers.reserve(base.sample_count());
  for (int g = 0; g < base.sample_count(); ++g) fibers.push_back(fn(g));
  return AlgebraElement(base, amp, std::move(fibers));
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement out = *this;
  for (CMat& f : out.fibers_) f = f.adjoint().eval();
  return out;
}

AlgebraElement AlgebraElement::pow(int k) const {
  if (k < 0) return adjoint().pow(-k);
  AlgebraElement out = identity(base_, amp_);
  // Plain repeated multiplication: exponents here are small (m, n <= ~10)
  // and this keeps rounding behavior independent of the exponent's bits.
  for (int i = 0; i < k; ++i) out = out * (*this);
  return out;
}

AlgebraElement AlgebraElement::oplus_identity(int extra) const {
  if (extra < 0) throw DimensionMismatchError("direct summand must be >= 0");
  if (extra == 0) return *this;
  const CMat one = dimdrop::identity(base_.dim(extra));
  AlgebraElement out;
  out.base_ = base_;
  out.amp_ = amp_ + extra;
  out.fibers_.reserve(fibers_.size());
  for (const CMat& f : fibers_) out.fibers_.push_back(direct_sum(f, one));
  return out;
}

AlgebraElement AlgebraElement::tensor_identity(int n) const {
  if (n < 1) throw DimensionMismatchError("tensor factor must be >= 1");
  AlgebraElement out;
  out.base_ = base_;
  out.amp_ = amp_ * n;
  out.fibers_.reserve(fibers_.size());
  const CMat one = dimdrop::identity(n);
  for (const CMat& f : fibers_) out.fibers_.push_back(tensor_product(f, one));
  return out;
}

void AlgebraElement::check_compatible(const AlgebraElement& rhs,
                                      const char* op) const {
  if (!(base_ == rhs.base_) || amp_ != rhs.amp_) {
    throw DimensionMismatchError(std::string(op) +
                                 ": operands live in different algebras");
  }
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& rhs) const {
  check_compatible(rhs, "product");
  AlgebraElement out = *this;
  for (int g = 0; g < fiber_count(); ++g) {
    out.fibers_[g] = fibers_[g] * rhs.fibers_[g];
  }
  return out;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& rhs) const {
  check_compatible(rhs, "sum");
  AlgebraElement out = *this;
  for (int g = 0; g < fiber_count(); ++g) out.fibers_[g] += rhs.fibers_[g];
  return out;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& rhs) const {
  check_compatible(rhs, "difference");
  AlgebraElement out = *this;
  for (int g = 0; g < fiber_count(); ++g) out.fibers_[g] -= rhs.fibers_[g];
  return out;
}

double AlgebraElement::distance(const AlgebraElement& rhs) const {
  check_compatible(rhs, "distance");
  return par::parallel_max(fiber_count(), [&](int g) {
    return operator_norm(fibers_[g] - rhs.fibers_[g]);
  });
}

double AlgebraElement::norm() const {
  return par::parallel_max(fiber_count(),
                           [&](int g) { return operator_norm(fibers_[g]); });
}

double AlgebraElement::unitarity_defect() const {
  return par::parallel_max(fiber_count(), [&](int g) {
    return dimdrop::unitarity_defect(fibers_[g]);
  });
}

double AlgebraElement::projection_defect() const {
  return par::parallel_max(fiber_count(), [&](int g) {
    const CMat& p = fibers_[g];
    const double self_adjoint = operator_norm(p - p.adjoint());
    const double idempotent = operator_norm(p * p - p);
    return std::max(self_adjoint, idempotent);
  });
}

double AlgebraElement::max_fiber_jump() const {
  if (fiber_count() <= 1) return 0.0;
  return par::parallel_max(fiber_count(), [&](int g) {
    const int h = (g + 1) % fiber_count();
    return operator_norm(fibers_[h] - fibers_[g]);
  });
}

bool AlgebraElement::same_bits(const AlgebraElement& rhs) const {
  if (!(base_ == rhs.base_) || amp_ != rhs.amp_) return false;
  for (int g = 0; g < fiber_count(); ++g) {
    if (fibers_[g].rows() != rhs.fibers_[g].rows()) return false;
    if ((fibers_[g].array() != rhs.fibers_[g].array()).any()) return false;
  }
  return true;
}

AlgebraElement mu_k(const AlgebraElement& u, int k) {
  if (k < 1) throw DimensionMismatchError("mu_k needs k >= 1");
  return u.oplus_identity((k - 1) * u.amp());
}

// ---------------------------------------------------------------------------
// GridPath
// ---------------------------------------------------------------------------

GridPath::GridPath(std::vector<AlgebraElement> samples)
    : samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw SizeMismatchError("a path needs at least two samples");
  }
  for (const AlgebraElement& s : samples_) {
    if (!(s.base() == samples_.front().base()) ||
        s.amp() != samples_.front().amp()) {
      throw DimensionMismatchError("path samples live in different algebras");
    }
  }
}

GridPath GridPath::constant(const AlgebraElement& value, int resolution) {
  if (resolution < 1) throw SizeMismatchError("path resolution must be >= 1");
  return GridPath(
      std::vector<AlgebraElement>(static_cast<size_t>(resolution) + 1, value));
}

double GridPath::max_step_jump() const {
  double worst = 0.0;
  for (size_t i = 0; i + 1 < samples_.size(); ++i) {
    worst = std::max(worst, samples_[i].distance(samples_[i + 1]));
  }
  return worst;
}

double GridPath::max_unitarity_defect() const {
  double worst = 0.0;
  for (const AlgebraElement& s : samples_) {
    worst = std::max(worst, s.unitarity_defect());
  }
  return worst;
}

double GridPath::distance(const GridPath& rhs) const {
  if (rhs.sample_count() != sample_count()) {
    throw SizeMismatchError("path distance needs equal resolutions");
  }
  double worst = 0.0;
  for (int i = 0; i < sample_count(); ++i) {
    worst = std::max(worst, samples_[i].distance(rhs.samples_[i]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Dimension drop checks
// ---------------------------------------------------------------------------

namespace {

// Measures how far `fiber` is from x (x) 1_n (n outer identity copies) and
// returns the top-left block as the witness x. The defect is the norm of
// fiber minus the block-diagonal replication of that witness.
double tensor_form_defect(const CMat& fiber, int n, CMat* witness) {
  const int d = static_cast<int>(fiber.rows()) / n;
  *witness = fiber.block(0, 0, d, d);
  CMat model = tensor_product(*witness, identity(n));
  return operator_norm(fiber - model);
}

}  // namespace

DdCheckResult dd_check(const GridPath& path, int m, int n,
                       double boundary_tol) {
  if (m < 1 || n < 1) throw DimensionMismatchError("dd_check needs m, n >= 1");
  if (path.amp() % (m * n) != 0) {
    throw DimensionMismatchError(
        "dd_check: amplification is not a multiple of m*n");
  }
  const BaseAlgebra& base = path.base();
  const int amp_a = path.amp() / n;  // witness a lives in M_{amp/n}
  const int amp_b = path.amp() / m;

  DdCheckResult result;
  std::vector<CMat> a_fibers(base.sample_count());
  std::vector<CMat> b_fibers(base.sample_count());
  double defect_a = 0.0;
  double defect_b = 0.0;
  for (int g = 0; g < base.sample_count(); ++g) {
    defect_a = std::max(
        defect_a, tensor_form_defect(path.front().fiber(g), n, &a_fibers[g]));
    defect_b = std::max(
        defect_b, tensor_form_defect(path.back().fiber(g), m, &b_fibers[g]));
  }
  result.defect_a = defect_a;
  result.defect_b = defect_b;
  result.ok = defect_a <= boundary_tol && defect_b <= boundary_tol;
  if (result.ok) {
    DimensionDropElement element;
    element.path = path;
    element.m = m;
    element.n = n;
    element.a = AlgebraElement(base, amp_a, std::move(a_fibers));
    element.b = AlgebraElement(base, amp_b, std::move(b_fibers));
    element.defect_a = defect_a;
    element.defect_b = defect_b;
    result.element = std::move(element);
  }
  return result;
}

DimensionDropElement dd_require(const GridPath& path, int m, int n,
                                double boundary_tol) {
  DdCheckResult result = dd_check(path, m, n, boundary_tol);
  if (!result.ok) {
    throw BoundaryViolationError(
        "endpoint is not in tensor form: defects " +
        std::to_string(result.defect_a) + " / " +
        std::to_string(result.defect_b) + " exceed " +
        std::to_string(boundary_tol));
  }
  return *std::move(result.element);
}

DimensionDropElement iota_embed(const AlgebraElement& u, int m, int n,
                                int resolution) {
  // u (x) 1_{m*n} is block-diagonal with m*n outer copies, so both endpoint
  // recoveries are bitwise sub-blocks of the input: the check is exact.
  GridPath path = GridPath::constant(u.tensor_identity(m * n), resolution);
  return dd_require(path, m, n, 0.0);
}

GridPath star_concat(const GridPath& f, const GridPath& g, double glue_tol) {
  if (f.resolution() != g.resolution()) {
    throw SizeMismatchError("star_concat needs equal resolutions");
  }
  const int T = f.resolution();
  if (T % 2 != 0) {
    throw SizeMismatchError("star_concat needs an even resolution");
  }
  if (!(f.base() == g.base()) || f.amp() != g.amp()) {
    throw DimensionMismatchError("star_concat operands differ in algebra");
  }
  const double glue = f.back().distance(g.back());
  if (glue > glue_tol) {
    throw GlueMismatchError("glue mismatch " + std::to_string(glue) +
                            " exceeds " + std::to_string(glue_tol));
  }
  std::vector<AlgebraElement> samples;
  samples.reserve(static_cast<size_t>(T) + 1);
  // First half runs f forward on even indices; the glue sample at i = T/2 is
  // f's final sample verbatim. Second half runs g backwards.
  for (int i = 0; i <= T / 2; ++i) samples.push_back(f.sample(2 * i));
  for (int i = T / 2 + 1; i <= T; ++i) samples.push_back(g.sample(2 * T - 2 * i));
  return GridPath(std::move(samples));
}

}  // namespace dimdrop
