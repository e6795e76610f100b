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

#include "dimdrop/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "dimdrop/errors.hpp"
#include "dimdrop/parallel.hpp"

namespace dimdrop {

// ---------------------------------------------------------------------------
// PathSequence
// ---------------------------------------------------------------------------

PathSequence::PathSequence(int degree, int resolution,
                           std::vector<std::vector<CMat>> paths)
    : degree_(degree), resolution_(resolution), paths_(std::move(paths)) {
  if (degree_ < 1) throw DimensionMismatchError("sequence degree must be >= 1");
  if (resolution_ < 1) throw SizeMismatchError("sequence resolution must be >= 1");
  if (static_cast<int>(paths_.size()) != degree_) {
    throw SizeMismatchError("a degree-n sequence needs exactly n paths");
  }
  for (const auto& path : paths_) {
    if (static_cast<int>(path.size()) != resolution_ + 1) {
      throw SizeMismatchError("every path needs resolution + 1 samples");
    }
    for (const CMat& w : path) {
      if (w.rows() != degree_ || w.cols() != degree_) {
        throw DimensionMismatchError("path samples must be degree x degree");
      }
    }
    // The algebraic identities downstream (exact basepoint, bitwise t = 0
    // slices) rely on the time-zero sample being the identity to the bit.
    if ((path[0].array() != identity(degree_).array()).any()) {
      throw PreconditionError("paths must start at the exact identity");
    }
  }
}

PathSequence PathSequence::standard(int degree, int resolution) {
  std::vector<std::vector<CMat>> paths(degree);
  for (int j = 1; j <= degree; ++j) {
    paths[j - 1].reserve(resolution + 1);
    for (int t = 0; t <= resolution; ++t) {
      CMat w = identity(degree);
      if (j > 1) {
        // Rotation by pi/2 in the (1, j) plane. The endpoint values are
        // snapped so W_j(1)^* e_jj W_j(1) = e_11 holds to the bit.
        double c, s;
        if (t == 0) {
          c = 1.0;
          s = 0.0;
        } else if (t == resolution) {
          c = 0.0;
          s = 1.0;
        } else {
          const double angle = 0.5 * std::numbers::pi *
                               static_cast<double>(t) /
                               static_cast<double>(resolution);
          c = std::cos(angle);
          s = std::sin(angle);
        }
        w(0, 0) = c;
        w(0, j - 1) = s;
        w(j - 1, 0) = -s;
        w(j - 1, j - 1) = c;
      }
      paths[j - 1].push_back(std::move(w));
    }
  }
  return PathSequence(degree, resolution, std::move(paths));
}

const CMat& PathSequence::at(int j, int t) const { return paths_[j - 1][t]; }

double PathSequence::Defects::worst() const {
  return std::max({unitarity, determinant, endpoint_conj});
}

PathSequence::Defects PathSequence::validate() const {
  Defects d;
  const CMat e11 = matrix_unit(degree_, 1, 1);
  for (int j = 1; j <= degree_; ++j) {
    const auto& path = paths_[j - 1];
    for (int t = 0; t <= resolution_; ++t) {
      d.unitarity = std::max(d.unitarity, unitarity_defect(path[t]));
      d.determinant =
          std::max(d.determinant, std::abs(determinant(path[t]) - cplx(1.0)));
      if (t > 0) {
        d.max_step_jump =
            std::max(d.max_step_jump, operator_norm(path[t] - path[t - 1]));
      }
    }
    const CMat& end = path[resolution_];
    const CMat ejj = matrix_unit(degree_, j, j);
    d.endpoint_conj = std::max(
        d.endpoint_conj, operator_norm(end.adjoint() * ejj * end - e11));
  }
  return d;
}

void PathSequence::require_valid(double tol) const {
  const Defects d = validate();
  if (d.unitarity > tol || d.determinant > tol) {
    throw NotUnitaryError("sequence leaves SU(n): defect " +
                          std::to_string(std::max(d.unitarity, d.determinant)));
  }
  if (d.endpoint_conj > tol) {
    throw NotInHnjError("sequence endpoint misses the corner condition by " +
                        std::to_string(d.endpoint_conj));
  }
}

PathSequence PathSequence::conjugated(const CMat& c) const {
  if (c.rows() != degree_ || c.cols() != degree_) {
    throw DimensionMismatchError("conjugator dimension mismatch");
  }
  if (unitarity_defect(c) > 1e-12) {
    throw NotUnitaryError("conjugator must be unitary");
  }
  // Only diagonal conjugators commute with every e_jj, which is what keeps
  // both sequence invariants (corner condition and determinant) intact.
  CMat off = c;
  off.diagonal().setZero();
  if (operator_norm(off) > 1e-12) {
    throw PreconditionError("conjugator must be diagonal");
  }
  std::vector<std::vector<CMat>> paths(degree_);
  for (int j = 1; j <= degree_; ++j) {
    paths[j - 1].reserve(resolution_ + 1);
    for (int t = 0; t <= resolution_; ++t) {
      if (t == 0) {
        paths[j - 1].push_back(identity(degree_));
      } else {
        paths[j - 1].push_back(c.adjoint() * at(j, t) * c);
      }
    }
  }
  return PathSequence(degree_, resolution_, std::move(paths));
}

// ---------------------------------------------------------------------------
// ElementaryMap
// ---------------------------------------------------------------------------

ElementaryMap::ElementaryMap(PathSequence sequence)
    : sequence_(std::move(sequence)) {
  const int n = sequence_.degree();
  const int T = sequence_.resolution();
  proj_.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    proj_[t].reserve(n);
    for (int j = 1; j <= n; ++j) {
      // Factor j at time t is 1 + (u - 1) (x) a a^* with a the conjugated
      // j-th row of W_j(t).
      proj_[t].push_back(sequence_.at(j, t).row(j - 1).adjoint());
    }
  }
}

AlgebraElement ElementaryMap::eval(const AlgebraElement& u, int t) const {
  const int n = degree();
  const int d = u.dim();
  if (t < 0 || t > resolution()) {
    throw SizeMismatchError("time index out of range");
  }
  const int fibers = u.fiber_count();
  std::vector<CMat> out(fibers);
  par::parallel_for(fibers, [&](int g) {
    const CMat u_minus = u.fiber(g) - identity(d);
    CMat x = identity(n * d);
    CMat y(n * d, d), z(n * d, d);
    for (int j = 0; j < n; ++j) {
      const CVec& a = proj_[t][j];
      // y = sum_p a_p * (block column p of x); skipping exact zeros keeps
      // the standard (Givens) sequences at two terms per factor.
      y.setZero();
      for (int p = 0; p < n; ++p) {
        if (a[p] != cplx(0.0)) y += a[p] * x.middleCols(p * d, d);
      }
      z.noalias() = y * u_minus;
      for (int o = 0; o < n; ++o) {
        const cplx w = std::conj(a[o]);
        if (w != cplx(0.0)) x.middleCols(o * d, d) += w * z;
      }
    }
    out[g] = std::move(x);
  });
  return AlgebraElement(u.base(), n * u.amp(), std::move(out));
}

GridPath ElementaryMap::image(const AlgebraElement& u) const {
  std::vector<AlgebraElement> samples;
  samples.reserve(resolution() + 1);
  for (int t = 0; t <= resolution(); ++t) samples.push_back(eval(u, t));
  return GridPath(std::move(samples));
}

// ---------------------------------------------------------------------------
// H_{n,j}
// ---------------------------------------------------------------------------

double hnj_defect(int n, int j, const CMat& w) {
  if (w.rows() != n || w.cols() != n || j < 1 || j > n) {
    throw DimensionMismatchError("hnj_defect: bad dimensions");
  }
  const double su = std::max(unitarity_defect(w),
                             std::abs(determinant(w) - cplx(1.0)));
  const CMat conj_defect = w.adjoint() * matrix_unit(n, j, j) * w -
                           matrix_unit(n, 1, 1);
  return std::max(su, operator_norm(conj_defect));
}

bool hnj_membership(int n, int j, const CMat& w, double tol) {
  return hnj_defect(n, j, w) <= tol;
}

void hnj_require(int n, int j, const CMat& w, double tol) {
  const double defect = hnj_defect(n, j, w);
  if (defect > tol) {
    throw NotInHnjError("matrix misses H_{n,j} by " + std::to_string(defect));
  }
}

CMat hnj_sample(int n, int j) {
  if (j < 1 || j > n) throw DimensionMismatchError("hnj_sample: bad index");
  CMat w = identity(n);
  if (j > 1) {
    w(0, 0) = 0.0;
    w(j - 1, j - 1) = 0.0;
    w(0, j - 1) = 1.0;
    w(j - 1, 0) = -1.0;
  }
  return w;
}

std::vector<CMat> hnj_connect(int n, int j, const CMat& w0, const CMat& w1,
                              int resolution, double tol,
                              double branch_margin) {
  hnj_require(n, j, w0, tol);
  hnj_require(n, j, w1, tol);
  if (n == 1) {
    // SU(1) is a point; only snapping the contracted endpoints remains.
    std::vector<CMat> out(resolution + 1, w0);
    out.back() = w1;
    return out;
  }
  // Translate to H_{n,1}, which consists of the block-diagonal matrices
  // diag(conj(det v), v) with v in U(n-1). The path is a corner geodesic
  // with the determinant compensated in the (1,1) slot.
  const CMat s = hnj_sample(n, j);
  const CMat h0 = s.adjoint() * w0;
  const CMat h1 = s.adjoint() * w1;
  const CMat v0 = h0.block(1, 1, n - 1, n - 1);
  const CMat v1 = h1.block(1, 1, n - 1, n - 1);

  // Decide the route once, before emitting any sample: either the direct
  // geodesic, or (when v0^* v1 is log-antipodal) a two-leg detour. Mixing
  // routes mid-path would tear the path apart. The identity is the natural
  // waypoint, but it only helps when both endpoints have safe logarithms;
  // generic diagonal twists of v0 cover the leftover antipodal cases (a
  // permutation-like relative unitary keeps eigenvalue -1 under the
  // identity detour but loses it under any spread of distinct phases).
  std::function<CMat(double)> corner;
  const auto two_leg = [&](const CMat& mid) {
    const CMat l0 = unitary_log(CMat(v0.adjoint() * mid), tol, branch_margin);
    const CMat l1 = unitary_log(CMat(mid.adjoint() * v1), tol, branch_margin);
    return std::function<CMat(double)>([v0, mid, l0, l1](double tau) {
      if (tau <= 0.5) return CMat(v0 * exp_skew(2.0 * tau * l0));
      return CMat(mid * exp_skew((2.0 * tau - 1.0) * l1));
    });
  };
  try {
    const CMat l = unitary_log(CMat(v0.adjoint() * v1), tol, branch_margin);
    corner = [v0, l](double tau) { return CMat(v0 * exp_skew(tau * l)); };
  } catch (const BranchFailureError&) {
    CMat twist = zero_matrix(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      twist(i, i) = std::exp(cplx(0.0, (i + 1.0) / (n - 1)));
    }
    bool routed = false;
    for (const CMat& mid :
         {CMat(identity(n - 1)), CMat(v0 * twist), CMat(v0 * twist * twist)}) {
      try {
        corner = two_leg(mid);
        routed = true;
        break;
      } catch (const BranchFailureError&) {
      }
    }
    if (!routed) throw;
  }

  std::vector<CMat> out;
  out.reserve(resolution + 1);
  for (int t = 0; t <= resolution; ++t) {
    const double tau = static_cast<double>(t) / resolution;
    const CMat v = corner(tau);
    CMat h = zero_matrix(n);
    h(0, 0) = std::conj(determinant(v));
    h.block(1, 1, n - 1, n - 1) = v;
    out.push_back(s * h);
  }
  // The reconstruction above reproduces the endpoints only up to roundoff;
  // the contract is bitwise equality there.
  out.front() = w0;
  out.back() = w1;
  return out;
}

// ---------------------------------------------------------------------------
// Composite maps
// ---------------------------------------------------------------------------

ElementaryMap gamma_compose(const ElementaryMap& v, const ElementaryMap& w) {
  const int m = v.degree();
  const int n = w.degree();
  if (v.resolution() != w.resolution()) {
    throw SizeMismatchError("gamma_compose needs equal resolutions");
  }
  const int T = v.resolution();
  std::vector<std::vector<CMat>> paths(static_cast<size_t>(m) * n);
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= m; ++i) {
      const int c = (j - 1) * m + i;  // slot for factor V_i inside block j
      auto& path = paths[c - 1];
      path.reserve(T + 1);
      for (int t = 0; t <= T; ++t) {
        path.push_back(tensor_product(v.sequence().at(i, t),
                                      w.sequence().at(j, t)));
      }
    }
  }
  return ElementaryMap(PathSequence(m * n, T, std::move(paths)));
}

AlgebraElement gamma_direct_eval(const ElementaryMap& v, const ElementaryMap& w,
                                 const AlgebraElement& u, int t) {
  return w.eval(v.eval(u, t), t);
}

double gamma_agreement_defect(const ElementaryMap& v, const ElementaryMap& w,
                              const AlgebraElement& u) {
  const ElementaryMap gamma = gamma_compose(v, w);
  double worst = 0.0;
  for (int t = 0; t <= gamma.resolution(); ++t) {
    worst = std::max(worst,
                     gamma.eval(u, t).distance(gamma_direct_eval(v, w, u, t)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Basic maps
// ---------------------------------------------------------------------------

BasicMapSpec BasicMapSpec::standard(int k, int m, int n, int resolution) {
  if (std::gcd(m, n) != 1) {
    throw NotCoprimeError("basic map needs gcd(m, n) = 1");
  }
  if (k < 1 || k > std::min(m, n)) {
    throw ConfigError("basic map needs 1 <= k <= min(m, n)");
  }
  BasicMapSpec spec{k, m, n,
                    ElementaryMap(PathSequence::standard(n, resolution)),
                    ElementaryMap(PathSequence::standard(m, resolution))};
  return spec;
}

DimensionDropElement basic_map_eval(const BasicMapSpec& spec,
                                    const AlgebraElement& u,
                                    const RunConfig& cfg) {
  if (std::gcd(spec.m, spec.n) != 1) {
    throw NotCoprimeError("basic map needs gcd(m, n) = 1");
  }
  if (spec.w0.degree() != spec.n || spec.w1.degree() != spec.m) {
    throw DimensionMismatchError("basic map carries wrong-degree sequences");
  }
  if (u.amp() % spec.k != 0) {
    throw DimensionMismatchError(
        "input amplification is not a multiple of k");
  }
  if (!u.is_unitary(cfg.tol)) {
    throw NotUnitaryError("basic map input is not unitary");
  }
  const int c = u.amp() / spec.k;
  const AlgebraElement x0 = u.pow(spec.m).oplus_identity((spec.m - spec.k) * c);
  const AlgebraElement x1 = u.pow(spec.n).oplus_identity((spec.n - spec.k) * c);
  const GridPath f = spec.w0.image(x0);
  const GridPath g = spec.w1.image(x1);
  return dd_require(star_concat(f, g, cfg.glue_tol), spec.m, spec.n,
                    cfg.boundary_tol);
}

}  // namespace dimdrop
