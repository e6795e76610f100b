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

#include "dimdrop/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

namespace dimdrop {

CMat identity(Eigen::Index n) { return CMat::Identity(n, n); }

CMat zero_matrix(Eigen::Index n) { return CMat::Zero(n, n); }

CMat matrix_unit(Eigen::Index n, int i, int j) {
  if (i < 1 || j < 1 || i > n || j > n) {
    std::ostringstream msg;
    msg << "matrix_unit e_{" << i << "," << j << "} out of range for dim "
        << n;
    throw SizeMismatchError(msg.str());
  }
  CMat e = CMat::Zero(n, n);
  e(i - 1, j - 1) = cplx(1.0, 0.0);
  return e;
}

CMat tensor_product(const CMat& a, const CMat& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = b.rows();
  if (a.cols() != m || b.cols() != n) {
    throw SizeMismatchError("tensor_product expects square factors");
  }
  CMat out(m * n, m * n);
  // Second factor outer: block (i2, j2) of size m x m equals b(i2, j2) * a.
  for (Eigen::Index i2 = 0; i2 < n; ++i2) {
    for (Eigen::Index j2 = 0; j2 < n; ++j2) {
      out.block(i2 * m, j2 * m, m, m) = b(i2, j2) * a;
    }
  }
  return out;
}

CMat direct_sum(const CMat& a, const CMat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw SizeMismatchError("direct_sum expects square blocks");
  }
  const Eigen::Index m = a.rows();
  const Eigen::Index n = b.rows();
  CMat out = CMat::Zero(m + n, m + n);
  if (m > 0) out.topLeftCorner(m, m) = a;
  if (n > 0) out.bottomRightCorner(n, n) = b;
  return out;
}

double hermitian_norm(const CMat& h) {
  if (h.rows() == 0) return 0.0;
  CMat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(sym, Eigen::EigenvaluesOnly);
  const auto& vals = solver.eigenvalues();
  return std::max(std::abs(vals.minCoeff()), std::abs(vals.maxCoeff()));
}

double operator_norm(const CMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // ||m|| = sqrt(lambda_max(m^* m)); the Gram matrix is Hermitian psd, so the
  // self-adjoint solver is both deterministic and exact-to-roundoff here.
  CMat gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<CMat> solver(gram, Eigen::EigenvaluesOnly);
  const double top = std::max(0.0, solver.eigenvalues().maxCoeff());
  return std::sqrt(top);
}

double unitarity_defect(const CMat& u) {
  if (u.rows() != u.cols()) {
    throw SizeMismatchError("unitarity_defect expects a square matrix");
  }
  CMat gram = u.adjoint() * u;
  gram -= CMat::Identity(u.rows(), u.cols());
  return hermitian_norm(gram);
}

bool is_unitary(const CMat& u, double tol) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tol;
}

bool is_special_unitary(const CMat& u, double tol) {
  return is_unitary(u, tol) && std::abs(determinant(u) - cplx(1.0, 0.0)) <= tol;
}

bool is_projection(const CMat& p, double tol) {
  if (p.rows() != p.cols()) return false;
  const double herm = operator_norm(CMat(p - p.adjoint()));
  const double idem = operator_norm(CMat(p * p - p));
  return herm <= tol && idem <= tol;
}

cplx determinant(const CMat& m) {
  if (m.rows() != m.cols()) {
    throw SizeMismatchError("determinant expects a square matrix");
  }
  if (m.rows() == 0) return cplx(1.0, 0.0);
  return m.determinant();
}

UnitaryEigensystem eig_unitary(const CMat& u) {
  if (u.rows() != u.cols()) {
    throw SizeMismatchError("eig_unitary expects a square matrix");
  }
  const Eigen::Index n = u.rows();
  UnitaryEigensystem out;
  out.phases = RVec(n);
  if (n == 0) {
    out.vectors = CMat(0, 0);
    return out;
  }
  Eigen::ComplexSchur<CMat> schur(u, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw NotUnitaryError("Schur decomposition failed to converge");
  }
  // For a normal matrix the Schur triangle is diagonal up to roundoff, so the
  // diagonal carries the spectrum and the Schur basis is an orthonormal
  // eigenbasis.
  RVec raw(n);
  for (Eigen::Index i = 0; i < n; ++i) raw(i) = std::arg(schur.matrixT()(i, i));
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&raw](Eigen::Index a, Eigen::Index b) {
                     return raw(a) < raw(b);
                   });
  out.vectors = CMat(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.phases(i) = raw(order[i]);
    out.vectors.col(i) = schur.matrixU().col(order[i]);
  }
  return out;
}

CMat unitary_log(const CMat& u, double tol, double branch_margin) {
  const double defect = unitarity_defect(u);
  if (defect > tol) {
    std::ostringstream msg;
    msg << "unitary_log input has unitarity defect " << defect
        << " (tol " << tol << ")";
    throw NotUnitaryError(msg.str());
  }
  UnitaryEigensystem eig = eig_unitary(u);
  constexpr double pi = std::numbers::pi;
  for (Eigen::Index i = 0; i < eig.phases.size(); ++i) {
    if (pi - std::abs(eig.phases(i)) < branch_margin) {
      std::ostringstream msg;
      msg << "eigen-phase " << eig.phases(i) << " within " << branch_margin
          << " of the +-pi branch cut";
      throw BranchFailureError(msg.str());
    }
  }
  CMat log = eig.vectors *
             (cplx(0.0, 1.0) * eig.phases.cast<cplx>().array()).matrix()
                 .asDiagonal() *
             eig.vectors.adjoint();
  // Exact skew-Hermitian projection; removes the roundoff Hermitian part.
  return 0.5 * (log - log.adjoint().eval());
}

CMat exp_skew(const CMat& s) {
  if (s.rows() != s.cols()) {
    throw SizeMismatchError("exp_skew expects a square matrix");
  }
  const Eigen::Index n = s.rows();
  if (n == 0) return CMat(0, 0);
  if (s.cwiseAbs().maxCoeff() == 0.0) return CMat::Identity(n, n);
  // -i * s is Hermitian for skew-Hermitian s; symmetrize to defend against
  // roundoff in the caller's arithmetic.
  CMat herm = cplx(0.0, -1.0) * s;
  herm = 0.5 * (herm + herm.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<CMat> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw NotUnitaryError("eigendecomposition failed in exp_skew");
  }
  CVec diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    diag(i) = std::polar(1.0, solver.eigenvalues()(i));
  }
  return solver.eigenvectors() * diag.asDiagonal() *
         solver.eigenvectors().adjoint();
}

CMat unitary_geodesic(const CMat& u0, const CMat& u1, double t, double tol,
                      double branch_margin) {
  if (u0.rows() != u1.rows() || u0.cols() != u1.cols()) {
    throw SizeMismatchError("unitary_geodesic endpoints differ in size");
  }
  if (t == 0.0) return u0;
  CMat rel = u0.adjoint() * u1;
  CMat log = unitary_log(rel, tol, branch_margin);
  return u0 * exp_skew(CMat(t * log));
}

namespace {

// Nearest special-unitary matrix to m: the polar factor with the
// determinant phase spread evenly over the diagonal. Returns false when m
// is too close to singular for the projection to mean anything.
bool project_su(const CMat& m, CMat* out) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 0.5) return false;
  CMat u = svd.matrixU() * svd.matrixV().adjoint();
  const double phase = std::arg(determinant(u));
  u *= std::exp(cplx(0.0, -phase / static_cast<double>(u.rows())));
  *out = std::move(u);
  return true;
}

}  // namespace

std::pair<double, double> relax_unitary_grid(
    std::vector<std::vector<CMat>>* rows, bool periodic_cols,
    double row_step_target, double col_step_target) {
  auto& g = *rows;
  const int last_row = static_cast<int>(g.size()) - 1;
  const int cols = static_cast<int>(g.front().size());
  const int col_lo = periodic_cols ? 0 : 1;
  const int col_hi = periodic_cols ? cols - 1 : cols - 2;

  const auto worst_steps = [&]() {
    std::pair<double, double> w{0.0, 0.0};
    for (int r = 0; r <= last_row; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (r > 0) {
          w.first = std::max(w.first, (g[r][c] - g[r - 1][c]).norm());
        }
        const bool free_row = r > 0 && r < last_row;
        if (free_row && c > 0) {
          w.second = std::max(w.second, (g[r][c] - g[r][c - 1]).norm());
        }
        if (free_row && periodic_cols && c + 1 == cols) {
          w.second = std::max(w.second, (g[r][c] - g[r][0]).norm());
        }
      }
    }
    return w;
  };

  std::pair<double, double> prev = worst_steps();
  if (last_row < 2 || col_hi < col_lo) return prev;
  if (prev.first <= row_step_target && prev.second <= col_step_target) {
    return prev;
  }
  constexpr int kMaxSweeps = 2500;
  constexpr int kCheckEvery = 16;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    for (int r = 1; r < last_row; ++r) {
      for (int c = col_lo; c <= col_hi; ++c) {
        const int left = c > 0 ? c - 1 : cols - 1;
        const int right = c + 1 < cols ? c + 1 : 0;
        const CMat mean =
            g[r - 1][c] + g[r + 1][c] + g[r][left] + g[r][right];
        CMat snapped;
        if (project_su(mean, &snapped)) g[r][c] = std::move(snapped);
      }
    }
    if (sweep % kCheckEvery == 0) {
      const std::pair<double, double> now = worst_steps();
      if (now.first <= row_step_target && now.second <= col_step_target) {
        return now;
      }
      if (now.first > 0.9995 * prev.first &&
          now.second > 0.9995 * prev.second) {
        return now;
      }
      prev = now;
    }
  }
  return prev;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::BranchFailure: return "BranchFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::BoundaryViolation: return "BoundaryViolation";
    case ErrorKind::GlueMismatch: return "GlueMismatch";
    case ErrorKind::UnwrapFailure: return "UnwrapFailure";
    case ErrorKind::NotInHnj: return "NotInHnj";
    case ErrorKind::ClassMismatch: return "ClassMismatch";
    case ErrorKind::NyquistViolation: return "NyquistViolation";
    case ErrorKind::RankJump: return "RankJump";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::NotCornerUnitary: return "NotCornerUnitary";
    case ErrorKind::NotFull: return "NotFull";
    case ErrorKind::SubprojectionFailure: return "SubprojectionFailure";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Serialization: return "Serialization";
  }
  return "Unknown";
}

}  // namespace dimdrop
