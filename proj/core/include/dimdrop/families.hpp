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

#include <string>
#include <vector>

#include "dimdrop/certificate.hpp"
#include "dimdrop/homotopy.hpp"
#include "dimdrop/phases.hpp"
#include "dimdrop/rng.hpp"

namespace dimdrop {

// ---------------------------------------------------------------------------
// Seeded test vectors.
// ---------------------------------------------------------------------------

// A seeded unitary of the given amplification. On circle bases this is a
// smooth loop C0 * V * diag(exp(i c_l theta)) * V^* with small integer
// exponents c_l, so adjacent fibers stay close and determinant windings are
// well sampled; on point bases it is a plain random unitary.
AlgebraElement sample_unitary(const BaseAlgebra& base, int amp, SeededRng& rng);

// The canonical loop of winding c: diag(z^c, 1, ..., 1) (identity off the
// circle).
AlgebraElement winding_loop(const BaseAlgebra& base, int amp, long long c);

// ---------------------------------------------------------------------------
// One-map families.
// ---------------------------------------------------------------------------

// The contraction H(s, t) = E(u; s t): constant u (x) 1_n at s = 0 and the
// full elementary image at s = 1.
HomotopyCertificate shrink_family(const ElementaryMap& e,
                                  const AlgebraElement& u,
                                  const RunConfig& cfg);

// The shear family Gamma_s(u; t) = W(V(u; s + t - s t); t): Gamma_0 is the
// composite gamma, Gamma_1 is W(u^m (+) 1_{m-1}; .), and the t = 1 column is
// pinned at u^{mn} (+) 1_{mn-1} for every s.
HomotopyCertificate gamma_shear(const ElementaryMap& v, const ElementaryMap& w,
                                const AlgebraElement& u, const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Relative-endpoint homotopy between two sampled unitary paths.
// ---------------------------------------------------------------------------

class RelEndpointFamily {
 public:
  RelEndpointFamily(std::vector<CMat> p, PhaseTracks tracks);

  int resolution() const { return static_cast<int>(p_.size()) - 1; }
  // H(s, t) = P(t) exp(s L(t)), evaluated through the eigentracks. s = 0
  // returns P's samples bitwise.
  std::vector<CMat> slice(double s) const;

 private:
  std::vector<CMat> p_;
  PhaseTracks tracks_;
};

// Connects P to Q with endpoints pinned, via H(s,t) = P(t) exp(s L(t)) where
// L is a t-continuous logarithm of P(t)^* Q(t) unwrapped from L(0) = 0.
// Endpoint mismatch beyond endpoint_tol throws PreconditionError. An
// ambiguous unwrap (phase step >= pi/2) is retried once on a midpoint-refined
// grid before UnwrapFailureError escapes; the returned family always lives on
// P's original grid.
RelEndpointFamily rel_endpoint_homotopy(const std::vector<CMat>& p,
                                        const std::vector<CMat>& q,
                                        double endpoint_tol);

// ---------------------------------------------------------------------------
// Homotopy through elementary maps (connectedness of the parameter space).
// ---------------------------------------------------------------------------

struct ElementaryFamily {
  // slice_budget + 1 sequences; slices[0] is E's sequence bitwise and the
  // last slice reproduces F's up to the recorded defects.
  std::vector<PathSequence> slices;
  int append_slices = 0;  // index where the append stage hands over
  HomotopyCertificate certificate;
};

// Two stages per path j: (i) append — W_j grows a tail along the reversed
// connector from hnj_connect(F_j(1) -> E_j(1)), so every intermediate slice
// still ends inside H_{n,j}; (ii) straighten — rel_endpoint_homotopy pulls
// the appended path onto F_j with endpoints fixed.
ElementaryFamily elementary_homotopy(const ElementaryMap& e,
                                     const ElementaryMap& f, int slice_budget,
                                     const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Prop 2.5: basic maps are homotopic to the unitization embedding.
// ---------------------------------------------------------------------------

// Streams the three stages (shear both halves, straighten the second half,
// shrink) into the certifier; slice_budget is split into equal thirds.
// Requires spec.k == 1; the input may carry any amplification, which is how
// the same construction runs over matrix algebras M_k(A).
void eta_iota_stages(const BasicMapSpec& spec, const AlgebraElement& u,
                     int slice_budget, const RunConfig& cfg,
                     FamilyCertifier& certifier);

HomotopyCertificate eta_iota_certificate(const BasicMapSpec& spec,
                                         const AlgebraElement& u,
                                         const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Cor 2.6: compatibility with matrix amplification.
// ---------------------------------------------------------------------------

// The swap unitary on the two outer M_k legs together with a path from the
// swap to the identity in U(k^2). Conjugation by path[0] realizes the tensor
// flip psi; conjugation by the last entry is trivial, so the path carries
// Psi(v) = psi(mu_k(v)) into mu_k(v).
struct FlipUntwist {
  int k = 1;
  CMat swap;
  std::vector<CMat> path;  // path[0] = swap, path.back() = 1_{k^2}
  // Psi along the path: path[i] * mu_k(v) * path[i]^*.
  AlgebraElement psi(const AlgebraElement& v, int index) const;
};

FlipUntwist flip_untwist(int k, int resolution);

// Reorders the two outermost tensor legs of each fiber: input blocks indexed
// [a][b][d] come out as [b][a][d]. Pure index permutation, exact.
CMat exchange_legs(const CMat& x, int a, int b, int d);
AlgebraElement exchange_outer_pair(const AlgebraElement& x, int a, int b,
                                   int d);

struct DiagramCertificate {
  HomotopyCertificate upper_left;
  HomotopyCertificate lower_right;
  bool pass = false;
};

// Certifies both triangles of the amplification square:
//  * upper-left: eta o mu_k on U(A) is recognized (bitwise) as the k = 1
//    basic map, which eta_iota_certificate connects to iota;
//  * lower-right: mu_k o eta on U(M_k(A)) is carried by the explicit
//    tensor-leg permutation onto the basic map over B = M_k(A) evaluated at
//    Psi(v), then flip_untwist deforms Psi into mu_k and eta_iota over B
//    finishes at iota_B.
// u_samples seeded inputs are run per triangle; verdicts aggregate by max.
DiagramCertificate diagram_certificate(const BaseAlgebra& base, int k, int m,
                                       int n, int u_samples,
                                       const RunConfig& cfg);

}  // namespace dimdrop
