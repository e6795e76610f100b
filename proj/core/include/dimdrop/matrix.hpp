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

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "dimdrop/errors.hpp"

namespace dimdrop {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Index convention (used by every identification in the library)
//
// tensor_product(a, b) realizes a (x) b with the SECOND factor as the outer
// block index: for a in M_m and b in M_n the composite row index is
// i2*m + i1 (0-based), i.e.
//
//   (a (x) b)[i2*m + i1, j2*m + j1] = a[i1, j1] * b[i2, j2].
//
// Consequently tensor_product(x, identity(n)) is block diagonal with n copies
// of x, which is the amplification convention "x (x) 1_n = diag(x, ..., x)"
// that all dimension-drop boundary identifications route through. There is
// exactly one Kronecker convention in this codebase; do not introduce the
// transposed one.
// ---------------------------------------------------------------------------

CMat identity(Eigen::Index n);
CMat zero_matrix(Eigen::Index n);

// Matrix unit e_{i,j} with the operator-algebra 1-based index convention.
CMat matrix_unit(Eigen::Index n, int i, int j);

CMat tensor_product(const CMat& a, const CMat& b);
CMat direct_sum(const CMat& a, const CMat& b);

// Largest singular value. Computed from the Hermitian eigenproblem of m^* m
// (deterministic; no randomized estimators).
double operator_norm(const CMat& m);

// Operator norm of a Hermitian matrix (max |eigenvalue|). `h` is symmetrized
// internally so near-Hermitian inputs are safe.
double hermitian_norm(const CMat& h);

// || u^* u - 1 || in operator norm.
double unitarity_defect(const CMat& u);

bool is_unitary(const CMat& u, double tol);
bool is_special_unitary(const CMat& u, double tol);
bool is_projection(const CMat& p, double tol);

cplx determinant(const CMat& m);

// Deterministic eigendecomposition of a (near-)unitary matrix via the complex
// Schur form: for normal input the Schur triangle is diagonal up to roundoff,
// and the Schur basis is orthonormal by construction. Eigen-phases are
// returned ascending in (-pi, pi]; `vectors` columns follow the same order.
struct UnitaryEigensystem {
  RVec phases;
  CMat vectors;
};
UnitaryEigensystem eig_unitary(const CMat& u);

// Principal logarithm of a unitary. Throws NotUnitaryError if the unitarity
// defect exceeds `tol`, and BranchFailureError if any eigen-phase lies within
// `branch_margin` of +-pi (the branch cut). The result is exactly
// skew-Hermitian (symmetrized after assembly).
CMat unitary_log(const CMat& u, double tol = 1e-9,
                 double branch_margin = 1e-6);

// exp of a skew-Hermitian matrix through the Hermitian eigenproblem of -i*s
// (exact for normal inputs; no Pade/series scaling).
CMat exp_skew(const CMat& s);

// u0 * exp(t * log(u0^* u1)). Throws as unitary_log does.
CMat unitary_geodesic(const CMat& u0, const CMat& u1, double t,
                      double tol = 1e-9, double branch_margin = 1e-6);

// Pinned-boundary smoothing of a grid of unitaries: Gauss-Seidel sweeps
// replace each free sample by the special-unitary projection of its
// four-neighbor mean. The first and last rows never move; with
// periodic_cols the columns wrap (and all of them are free), otherwise the
// first and last columns are pinned too. Sweeps stop once every step
// between adjacent rows fits row_step_target and every step along a free
// row fits col_step_target — both in Frobenius norm, which dominates the
// operator norm — or once progress stalls. Returns the final worst
// (row step, col step) pair so callers can tell which.
std::pair<double, double> relax_unitary_grid(
    std::vector<std::vector<CMat>>* rows, bool periodic_cols,
    double row_step_target, double col_step_target);

}  // namespace dimdrop
