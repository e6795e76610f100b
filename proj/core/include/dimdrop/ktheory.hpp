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
#include <optional>
#include <string>
#include <vector>

#include "dimdrop/algebra.hpp"
#include "dimdrop/certificate.hpp"
#include "dimdrop/config.hpp"

namespace dimdrop {

// ---------------------------------------------------------------------------
// K-theoretic invariants of the base algebras.
//
// Over circle loops the K1 invariant of a unitary is the winding number of
// its pointwise determinant; over scalars and plain matrix fibers the
// unitary group is connected and the invariant is trivial.  Projections are
// classified by their (constant) fiberwise rank.
// ---------------------------------------------------------------------------

// K1 invariant.  `windings` has one entry per circle factor of the base:
// length one for circle-loop algebras, empty for scalars and matrices.
struct K1Class {
  std::vector<long long> windings;

  // Convenience scalar view: the single winding, or 0 for trivial groups.
  long long scalar() const { return windings.empty() ? 0 : windings[0]; }

  friend bool operator==(const K1Class& a, const K1Class& b) {
    return a.windings == b.windings;
  }
  friend bool operator!=(const K1Class& a, const K1Class& b) {
    return !(a == b);
  }
};

// K0 data of a projection: constant fiberwise rank and fullness.
struct K0Data {
  int rank = 0;
  bool full = false;
};

// Winding number of det(loop) around the origin for a cyclic sequence of
// unitary matrices (index G wraps to 0).  Phase increments are accumulated
// on the principal branch; an increment of magnitude >= pi/2 means the loop
// is sampled too coarsely to resolve the winding unambiguously (the true
// aliasing limit is pi; we flag at half that for safety) and raises
// NyquistViolationError.  The result is exact: the accumulated phase of a
// closed loop is an integer multiple of 2*pi up to rounding noise.
long long det_winding(const std::vector<CMat>& loop);

// Winding of det over the fibers of a circle-loop element.  Requires a
// circle-loop base (ConfigError otherwise) and a unitary element.
long long det_winding(const AlgebraElement& u);

// K1 class of a unitary element.  `tol` bounds the acceptable unitarity
// defect (NotUnitaryError beyond it).
K1Class k1_class(const AlgebraElement& u, double tol);

// Canonical representative diag(z^c, 1, ..., 1) of the class `cls` with
// `amp` amplification units over `base`.  Non-circle bases require the
// trivial class (ConfigError otherwise) and yield the identity.
AlgebraElement k1_representative(const BaseAlgebra& base, const K1Class& cls,
                                 int amp);

// Connects u to v inside U_0: returns a path of unitaries from u to v with
// `resolution` + 1 samples.  Preconditions: matching base/amp, both unitary
// within tol, equal K1 classes (ClassMismatchError).  The connecting path is
// u * exp(t * log(u^* v)) with the fiberwise logarithm chosen continuously
// along the circle; if the phase unwrapping fails to close it is retried
// once on a midpoint-refined grid before UnwrapFailureError propagates.
GridPath connect_in_u0(const AlgebraElement& u, const AlgebraElement& v,
                       int resolution, const RunConfig& cfg);

// Constant fiberwise rank and fullness of a projection (projection defect
// checked against tol; RankJumpError if the rank varies across fibers).
K0Data rank_fullness(const AlgebraElement& p, double tol);

// Minimal Bezout pair (j, k) with j*m + k*n == 1 for coprime m, n: |j| is
// minimized, ties broken toward positive j.  NotCoprimeError otherwise.
// Examples: (2,3) -> (-1,1); (1,n) -> (1,0) for n >= 2.
std::array<long long, 2> bezout(long long m, long long n);

// ---------------------------------------------------------------------------
// Corner (hereditary subalgebra) helpers.
//
// For a projection p, unitaries of the corner pAp are classified through the
// extension v |-> v + (1 - p), a unitary of the ambient algebra; K1 data of
// the corner is read off the extension.  Paths *inside* the corner are
// produced by restricting to a fiberwise orthonormal frame of range(p),
// computing there, and conjugating back -- the assembled result does not
// depend on the frame gauge.
// ---------------------------------------------------------------------------

// Compression p x p of an element to the corner of p (amplifications must
// match).
AlgebraElement corner_compress(const AlgebraElement& x,
                               const AlgebraElement& p);

// K1 class of a corner unitary v (v^* v == v v^* == p within tol, else
// NotCornerUnitaryError), computed from the extension v + (1 - p).
K1Class corner_k1(const AlgebraElement& v, const AlgebraElement& p,
                  double tol);

// Fiberwise orthonormal frame spanning range(p).  Constant 0/1-diagonal
// projections take the exact coordinate frame; otherwise eigenvectors are
// aligned fiber-to-fiber by orthogonal Procrustes, failing with
// SubprojectionFailureError when the alignment is ambiguous.  The wrap-
// around holonomy of the aligned frame is recorded (it is harmless for
// gauge-covariant uses such as subprojections and conjugated paths).
struct CornerFrame {
  int rank = 0;
  std::vector<CMat> frames;  // one (dim x rank) frame per fiber
  double alignment_defect = 0.0;      // wrap-around frame holonomy
};
CornerFrame corner_frame(const AlgebraElement& p, double tol);

// Rank-one subprojection of p: the first frame column, fiberwise, as a
// projection P1 <= p.  (P1 is gauge-invariant, hence periodic even when the
// frame itself carries holonomy.)
AlgebraElement rank1_subprojection(const AlgebraElement& p, double tol);

// Corner unitary of prescribed class c inside pAp over a circle base:
// p + (exp(i c theta) - 1) P1 with P1 a rank-one subprojection.  For c == 0
// (and for non-circle bases, where c must be 0) this is p itself.
AlgebraElement corner_winding_rep(const AlgebraElement& p,
                                  const AlgebraElement& p1, long long c);

// Murray-von Neumann intertwiner between projections of equal constant rank:
// a partial isometry w with w^* w == r0 and w w^* == r1, built from corner
// frames (RankJumpError when the ranks differ).
AlgebraElement mvn_partial_isometry(const AlgebraElement& r0,
                                    const AlgebraElement& r1, double tol);

// A partial isometry together with its support and range projections.
struct PartialIsometryElement {
  AlgebraElement v;
  AlgebraElement support;  // v^* v
  AlgebraElement range;    // v v^*

  // Validates that v^* v and v v^* are projections within tol and freezes
  // them (entries are not rounded; the exact products are kept).
  static PartialIsometryElement make(const AlgebraElement& v, double tol);
};

// ---------------------------------------------------------------------------
// Pipelines.
// ---------------------------------------------------------------------------

struct Lemma34Options {
  // Skip the Bezout-weighted corner correction.  With a correction-free
  // input of nonzero corner class the pipeline then reports the obstruction
  // (nonzero corrected corner class) and produces no path.
  bool disable_correction = false;
};

struct Lemma34Result {
  PipelineReport report;
  // The corrected unitaries u0 * (w^k (+) 1) and u1 * (w^-j (+) 1).
  AlgebraElement u0_corrected;
  AlgebraElement u1_corrected;
  // Path U_t with U_0 = u0_corrected (x) 1_n and U_1 = u1_corrected (x) 1_m,
  // conjugating q (x) 1_mn to p (x) 1_mn fiberwise; absent when the
  // obstruction is nonzero.
  std::optional<DimensionDropElement> element;
};

// Intertwines two conjugations of q into p (p (x) 1_m = u0^* (q (x) 1_m) u0
// and likewise u1 with n copies, gcd(m, n) == 1) by a path through the
// dimension drop algebra.  Corner classes of the comparison unitary
// V = (u1 (x) 1_m)^* (u0 (x) 1_n) over p (x) 1_mn and its complement are
// cancelled by Bezout-weighted corner windings; the corrected corner loops
// are then contracted inside U_0 of each corner.
Lemma34Result lemma34_pipeline(const AlgebraElement& p,
                               const AlgebraElement& q,
                               const AlgebraElement& u0,
                               const AlgebraElement& u1, int m, int n,
                               const RunConfig& cfg,
                               const Lemma34Options& opts = {});

// Construction half of the unitary-completion pipeline: given a partial
// isometry v (support p, range q) and a partner w with w^* w == 1 - p and
// w w^* == 1 - q, builds the complement v_perp = (q + u) w where u is a
// corner unitary of the complementary class -[v + w], so that v + v_perp is
// a unitary of trivial K1 class.
struct Corollary36Parts {
  AlgebraElement v_perp;
  AlgebraElement completed;         // v + v_perp
  long long class_vw = 0;           // [v + w] (winding; 0 off-circle)
  long long class_completed = 0;    // [v + v_perp], must be 0
};
Corollary36Parts corollary36_build(const PartialIsometryElement& v,
                                   const AlgebraElement& w,
                                   const RunConfig& cfg);

struct Corollary36Result {
  PipelineReport report;
  Corollary36Parts parts;
  GridPath path;  // from v + v_perp to the identity inside U_0
};

// Full pipeline: build the complement, verify v + v_perp is a unitary of
// class zero, and connect it to the identity.  NotFullError when 1 - p (or
// 1 - q) vanishes or fails fullness.
Corollary36Result corollary36_complement(const PartialIsometryElement& v,
                                         const AlgebraElement& w,
                                         const RunConfig& cfg);

struct Theorem39Result {
  PipelineReport report;
  // Path V_t of partial isometries with V_0 = v0 (x) 1_n and
  // V_1 = v1 (x) 1_m, V_t^* V_t == p (x) 1_mn, V_t V_t^* <= q (x) 1_mn.
  GridPath path;
};

// Connects two copies of p inside q through the dimension drop algebra of
// M_mn(qAq): with v_i^* v_i == p (x) 1_{m or n} and ranges under
// q (x) 1_{m or n}, the comparison W = (v1 (x) 1_m)(v0 (x) 1_n)^* is a
// partial isometry of M_mn(qAq) whose defect projections are full; the
// complement construction inside that algebra yields U in U_0 with
// W = U (W^* W), and V_t = U_t (v0 (x) 1_n) is the desired path.
// PreconditionViolationError when the exact relations fail beyond tol.
Theorem39Result theorem39_intertwiner(const AlgebraElement& p,
                                      const AlgebraElement& q,
                                      const AlgebraElement& v0,
                                      const AlgebraElement& v1, int m, int n,
                                      const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Demo fixtures.
//
// Small, fully explicit instances used by the command line demos and the
// test suite.  All are seeded and deterministic.
// ---------------------------------------------------------------------------

struct Lemma34Fixture {
  AlgebraElement p;
  AlgebraElement q;
  AlgebraElement u0;
  AlgebraElement u1;
  int m = 2;
  int n = 3;
};

// p = q = diag(1, 1, 0, 0) over a fiber of size 4; u0, u1 are seeded
// block-diagonal constant unitaries twisted by Bezout-split windings
// z^{k c} resp. z^{-j c} in the corner of p, so that the comparison
// unitary V has corner class exactly `injected_winding` over p (x) 1_mn.
Lemma34Fixture lemma34_demo_fixture(const BaseAlgebra& base, int m, int n,
                                    long long injected_winding,
                                    const RunConfig& cfg);

struct Corollary36Fixture {
  PartialIsometryElement v;
  AlgebraElement w;
};

// p = diag(1, 1, 0, 0), q = diag(0, 0, 1, 1) over a fiber of size 4;
// v carries `injected_winding` on the (3,1) matrix unit and w is the
// constant partner e13 + e24.  Over the circle with nonzero winding the
// completed unitary is a braided loop -- the injected turn and the
// cancelling turn of the complement ride different eigenlines -- so the
// connecting path exercises the braid contraction, not just a logarithm.
Corollary36Fixture corollary36_demo_fixture(const BaseAlgebra& base,
                                            long long injected_winding,
                                            const RunConfig& cfg);

struct Theorem39Fixture {
  AlgebraElement p;
  AlgebraElement q;
  AlgebraElement v0;
  AlgebraElement v1;
  int m = 2;
  int n = 3;
};

// p = diag(1, 0, 0, 0) and q = diag(1, 1, 1, 0) over a fiber of size 4
// (ranks 1 <= 3), with v0, v1 coordinate partial isometries implementing
// p (x) 1_m and p (x) 1_n under q, optionally conjugated by seeded
// unitaries of the ambient matrix algebras.
Theorem39Fixture theorem39_demo_fixture(const BaseAlgebra& base, int m, int n,
                                        const RunConfig& cfg);

}  // namespace dimdrop
