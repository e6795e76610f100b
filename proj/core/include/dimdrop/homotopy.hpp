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

#include "dimdrop/algebra.hpp"
#include "dimdrop/config.hpp"
#include "dimdrop/matrix.hpp"

namespace dimdrop {

// ---------------------------------------------------------------------------
// PathSequence: the data of an elementary map.
//
// A degree-n sequence consists of n paths W_1..W_n in SU(n), sampled on a
// common grid of T+1 times, with
//   * W_j(0) = 1 exactly (sample 0 is required to be the bitwise identity),
//   * W_j(1)^* e_jj W_j(1) = e_11 (each path moves the j-th diagonal matrix
//     unit to the corner).
// ---------------------------------------------------------------------------

class PathSequence {
 public:
  // paths[j-1][t] is W_j at time sample t. Throws PreconditionError unless
  // every path starts at the exact identity; other defects are reported by
  // validate() rather than enforced here.
  PathSequence(int degree, int resolution, std::vector<std::vector<CMat>> paths);

  // The standard sequence: W_1 constant, and W_j a Givens rotation in the
  // (1, j) coordinate plane through angle pi/2, traversed linearly in t.
  static PathSequence standard(int degree, int resolution);

  int degree() const { return degree_; }
  int resolution() const { return resolution_; }
  const CMat& at(int j, int t) const;  // j is 1-based
  const std::vector<CMat>& path(int j) const { return paths_[j - 1]; }

  struct Defects {
    double unitarity = 0.0;      // worst SU(n) membership defect
    double determinant = 0.0;    // worst |det - 1|
    double endpoint_conj = 0.0;  // worst |W_j(1)^* e_jj W_j(1) - e_11|
    double max_step_jump = 0.0;  // worst jump between adjacent samples
    double worst() const;
  };
  Defects validate() const;
  // Throws (NotUnitary / NotInHnj flavored) when validate() exceeds tol.
  void require_valid(double tol) const;

  // Conjugated sequence t |-> c^* W_j(t) c. Sample 0 is snapped back to the
  // exact identity (c^* c only rounds to it), preserving the invariant.
  PathSequence conjugated(const CMat& c) const;

 private:
  int degree_;
  int resolution_;
  std::vector<std::vector<CMat>> paths_;
};

// ---------------------------------------------------------------------------
// ElementaryMap: evaluation of u |-> prod_j W_j(t)^* (1 + (u-1) e_jj) W_j(t).
//
// Each factor equals 1 + (u - 1) (x) P_j(t) with P_j(t) the rank-one
// projection onto the j-th row of W_j(t); evaluation uses that rank-one
// structure, which keeps the cost at O(n^2 D^2 + n D^3) per factor instead
// of a dense product of (nD)-square matrices.
// ---------------------------------------------------------------------------

class ElementaryMap {
 public:
  explicit ElementaryMap(PathSequence sequence);

  const PathSequence& sequence() const { return sequence_; }
  int degree() const { return sequence_.degree(); }
  int resolution() const { return sequence_.resolution(); }

  // W(u; t) at time sample t; the result has amplification degree * u.amp().
  AlgebraElement eval(const AlgebraElement& u, int t) const;
  // The full image path [t -> W(u; t)], resolution T.
  GridPath image(const AlgebraElement& u) const;

 private:
  PathSequence sequence_;
  // proj_[t][j-1]: unit vector a with P_j(t) = a a^*; a is the conjugated
  // j-th row of W_j(t).
  std::vector<std::vector<CVec>> proj_;
};

// ---------------------------------------------------------------------------
// The subspaces H_{n,j} = { w in SU(n) : w^* e_jj w = e_11 }.
// ---------------------------------------------------------------------------

// max of SU(n) defect and the conjugation defect |w^* e_jj w - e_11|.
double hnj_defect(int n, int j, const CMat& w);
bool hnj_membership(int n, int j, const CMat& w, double tol);
// Throws NotInHnjError when the defect exceeds tol.
void hnj_require(int n, int j, const CMat& w, double tol);

// A concrete representative: the signed transposition exchanging coordinates
// 1 and j (identity for j = 1).
CMat hnj_sample(int n, int j);

// A discrete path from w0 to w1 inside H_{n,j}, sampled at T+1 points with
// endpoints bitwise equal to the inputs. Built by translating to H_{n,1},
// where membership means block-diagonal form diag(det-compensation, v), and
// running a geodesic in U(n-1). Near-antipodal geodesics are retried once
// through a midpoint waypoint before BranchFailureError escapes.
std::vector<CMat> hnj_connect(int n, int j, const CMat& w0, const CMat& w1,
                              int resolution, double tol,
                              double branch_margin);

// ---------------------------------------------------------------------------
// Composite and basic maps.
// ---------------------------------------------------------------------------

// The composite gamma = W after V of elementary maps (degrees n and m) as a
// degree-(m*n) elementary map: slot c = (j-1)*m + i carries the path
// t -> V_i(t) (x) W_j(t). Requires equal resolutions.
ElementaryMap gamma_compose(const ElementaryMap& v, const ElementaryMap& w);

// Direct two-stage evaluation W(V(u; t); t), used as the independent route
// against gamma_compose's single-product evaluation.
AlgebraElement gamma_direct_eval(const ElementaryMap& v, const ElementaryMap& w,
                                 const AlgebraElement& u, int t);

// max over the time grid of the distance between the two routes above.
double gamma_agreement_defect(const ElementaryMap& v, const ElementaryMap& w,
                              const AlgebraElement& u);

// Data of a basic map eta: U(M_k) -> dimension drop sections over (m, n),
// with gcd(m, n) = 1 and k <= min(m, n):
//   eta(u) = [W0 applied to u^m (+) 1] joined to [W1 applied to u^n (+) 1]
// by star_concat.
struct BasicMapSpec {
  int k = 1;
  int m = 1;
  int n = 1;
  // The u^m (+) 1_{m-k} half is dilated by a degree-n elementary map (its
  // endpoint produces u^{mn} (+) 1), and symmetrically for the other half.
  ElementaryMap w0;  // degree n, applied to u^m (+) 1_{m-k}
  ElementaryMap w1;  // degree m, applied to u^n (+) 1_{n-k}
  static BasicMapSpec standard(int k, int m, int n, int resolution);
};

// Evaluates the basic map on a unitary u over M_k (amplification k * c).
// Throws NotCoprimeError, NotUnitaryError, or dimension errors.
DimensionDropElement basic_map_eval(const BasicMapSpec& spec,
                                    const AlgebraElement& u,
                                    const RunConfig& cfg);

}  // namespace dimdrop
