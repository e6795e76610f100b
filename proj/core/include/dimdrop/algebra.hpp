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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dimdrop/matrix.hpp"

namespace dimdrop {

// ---------------------------------------------------------------------------
// Base coefficient algebras.
//
// Everything in this library is a matrix amplification over one of three
// concrete bases:
//   * Scalars      — the complex numbers (one fiber of size 1),
//   * Matrices(N)  — N x N complex matrices (one fiber of size N),
//   * CircleLoops(N, G) — continuous loops S^1 -> M_N, discretized on G
//     equispaced circle samples z_g = exp(2*pi*i*g/G), g = 0..G-1.
//
// An element of M_d(base) is stored as one (d*N) x (d*N) matrix per fiber.
// We call d the amplification ("amp"). The circle is sampled periodically:
// fiber G wraps to fiber 0, and smoothness is certified by per-step jump
// bounds rather than assumed.
// ---------------------------------------------------------------------------

enum class BaseKind { kScalars, kMatrices, kCircleLoops };

std::string to_string(BaseKind kind);

struct BaseAlgebra {
  BaseKind kind = BaseKind::kScalars;
  int fiber_size = 1;   // N
  int circle_grid = 0;  // G; meaningful for kCircleLoops only

  static BaseAlgebra scalars();
  static BaseAlgebra matrices(int n);
  static BaseAlgebra circle_loops(int n, int grid);

  bool is_circle() const { return kind == BaseKind::kCircleLoops; }
  // Number of fibers an element stores: G for loops, 1 otherwise.
  int sample_count() const { return is_circle() ? circle_grid : 1; }
  // Matrix dimension of an element of amplification `amp`.
  int dim(int amp) const { return amp * fiber_size; }
  // Circle parameter of fiber g, in [0, 2*pi).
  double angle(int g) const;

  friend bool operator==(const BaseAlgebra&, const BaseAlgebra&) = default;
};

// ---------------------------------------------------------------------------
// AlgebraElement: one element of M_amp(base), stored fiberwise.
// ---------------------------------------------------------------------------

class AlgebraElement {
 public:
  AlgebraElement() = default;
  // Validates that every fiber is square of dimension amp * base.fiber_size
  // and that the fiber count matches base.sample_count().
  AlgebraElement(BaseAlgebra base, int amp, std::vector<CMat> fibers);

  static AlgebraElement identity(const BaseAlgebra& base, int amp);
  static AlgebraElement zero(const BaseAlgebra& base, int amp);
  // Same matrix in every fiber.
  static AlgebraElement constant(const BaseAlgebra& base, int amp,
                                 const CMat& value);
  // Generic builder: fn(g) must return the fiber at circle sample g.
  static AlgebraElement from_fibers(const BaseAlgebra& base, int amp,
                                    const std::function<CMat(int)>& fn);

  const BaseAlgebra& base() const { return base_; }
  int amp() const { return amp_; }
  int dim() const { return base_.dim(amp_); }
  int fiber_count() const { return static_cast<int>(fibers_.size()); }
  const CMat& fiber(int g) const { return fibers_[g]; }
  CMat& fiber_mut(int g) { return fibers_[g]; }
  const std::vector<CMat>& fibers() const { return fibers_; }

  AlgebraElement adjoint() const;
  // Integer power; negative exponents use the adjoint (unitary inverse).
  AlgebraElement pow(int k) const;
  // x (+) 1_extra: direct sum with the identity of M_extra(base), appended
  // at the outer (leftmost) leg. `extra` is in amplification units.
  AlgebraElement oplus_identity(int extra) const;
  // x (x) 1_n: block-diagonal with n outer copies, per the fixed Kronecker
  // convention in matrix.hpp.
  AlgebraElement tensor_identity(int n) const;

  AlgebraElement operator*(const AlgebraElement& rhs) const;
  AlgebraElement operator+(const AlgebraElement& rhs) const;
  AlgebraElement operator-(const AlgebraElement& rhs) const;

  // sup over fibers of the operator-norm distance.
  double distance(const AlgebraElement& rhs) const;
  double norm() const;
  double unitarity_defect() const;
  double projection_defect() const;
  bool is_unitary(double tol) const { return unitarity_defect() <= tol; }
  bool is_projection(double tol) const { return projection_defect() <= tol; }
  // Largest jump between circularly adjacent fibers (0 off the circle).
  double max_fiber_jump() const;
  // True when every fiber is bitwise identical to rhs's.
  bool same_bits(const AlgebraElement& rhs) const;

 private:
  void check_compatible(const AlgebraElement& rhs, const char* op) const;

  BaseAlgebra base_;
  int amp_ = 0;
  std::vector<CMat> fibers_;
};

// u |-> diag(u, 1_{k-1}): the standard top-left inclusion of U(M_d(base))
// into U(M_{k*d}(base)).
AlgebraElement mu_k(const AlgebraElement& u, int k);

// ---------------------------------------------------------------------------
// GridPath: a path [0,1] -> M_amp(base) sampled at T+1 equispaced times.
// ---------------------------------------------------------------------------

class GridPath {
 public:
  GridPath() = default;
  // Requires at least two samples, all with identical base and amp.
  explicit GridPath(std::vector<AlgebraElement> samples);

  static GridPath constant(const AlgebraElement& value, int resolution);

  int resolution() const { return static_cast<int>(samples_.size()) - 1; }
  int sample_count() const { return static_cast<int>(samples_.size()); }
  const AlgebraElement& sample(int i) const { return samples_[i]; }
  const AlgebraElement& front() const { return samples_.front(); }
  const AlgebraElement& back() const { return samples_.back(); }
  const BaseAlgebra& base() const { return samples_.front().base(); }
  int amp() const { return samples_.front().amp(); }

  // max over adjacent samples of the sup-fiber distance.
  double max_step_jump() const;
  double max_unitarity_defect() const;
  // max over sample indices of the sup-fiber distance.
  double distance(const GridPath& rhs) const;

 private:
  std::vector<AlgebraElement> samples_;
};

// ---------------------------------------------------------------------------
// Dimension drop interval fibers.
//
// The prime dimension drop structure on a path f: [0,1] -> M_{m*n}(M_amp0)
// asks for f(0) = a (x) 1_n and f(1) = b (x) 1_m. dd_check recovers the
// candidates a, b from the first diagonal block of the endpoint fibers and
// reports how far the endpoints are from the required tensor form.
// ---------------------------------------------------------------------------

struct DimensionDropElement {
  GridPath path;
  int m = 1;
  int n = 1;
  AlgebraElement a;  // recovered endpoint witness at t = 0
  AlgebraElement b;  // recovered endpoint witness at t = 1
  double defect_a = 0.0;
  double defect_b = 0.0;
};

struct DdCheckResult {
  bool ok = false;
  double defect_a = 0.0;
  double defect_b = 0.0;
  std::optional<DimensionDropElement> element;  // set when ok
};

// Non-throwing structural check (throws only on dimension errors).
DdCheckResult dd_check(const GridPath& path, int m, int n, double boundary_tol);
// Throwing variant for pipelines that require validity.
DimensionDropElement dd_require(const GridPath& path, int m, int n,
                                double boundary_tol);

// The unitization embedding iota: u |-> the constant path u (x) 1_{m*n},
// which is a dimension drop element with a = u (x) 1_m, b = u (x) 1_n.
DimensionDropElement iota_embed(const AlgebraElement& u, int m, int n,
                                int resolution);

// Concatenation-with-reversal (f followed by g run backwards), realized by
// index arithmetic on a common even resolution T: the result r has
// r(i) = f(2i) for i <= T/2 and r(i) = g(2T - 2i) for i >= T/2. The glue
// point r(T/2) is taken from f exactly; the mismatch |f(1) - g(1)| must not
// exceed glue_tol.
GridPath star_concat(const GridPath& f, const GridPath& g, double glue_tol);

}  // namespace dimdrop
