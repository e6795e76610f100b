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

#include "dimdrop/ktheory.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "dimdrop/errors.hpp"
#include "dimdrop/phases.hpp"
#include "dimdrop/rng.hpp"

namespace dimdrop {

namespace {

constexpr double kPi = std::numbers::pi;

// Raw per-fiber toolkit.  Corner restrictions do not generally have
// dimensions divisible by the base fiber size, so everything that happens
// inside a compressed corner works on bare fiber lists instead of
// AlgebraElements.
using Fibers = std::vector<CMat>;

bool is_exact_diagonal_projection(const CMat& f) {
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      if (i == j) {
        if (f(i, i) != cplx(0.0, 0.0) && f(i, i) != cplx(1.0, 0.0)) {
          return false;
        }
      } else if (f(i, j) != cplx(0.0, 0.0)) {
        return false;
      }
    }
  }
  return true;
}

bool same_matrix_bits(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != b(i, j)) return false;
    }
  }
  return true;
}

void require_projection_fibers(const Fibers& p, double tol,
                               const char* what) {
  for (const CMat& f : p) {
    if (operator_norm(CMat(f * f - f)) > tol ||
        operator_norm(CMat(f - f.adjoint())) > tol) {
      throw PreconditionError(std::string(what) + " needs a projection");
    }
  }
}

CornerFrame raw_corner_frame(const Fibers& p, double tol) {
  if (p.empty()) throw SizeMismatchError("corner_frame: no fibers");
  require_projection_fibers(p, tol, "corner_frame");
  const Eigen::Index dim = p[0].rows();
  CornerFrame out;

  bool exact = is_exact_diagonal_projection(p[0]);
  for (std::size_t g = 1; exact && g < p.size(); ++g) {
    exact = same_matrix_bits(p[g], p[0]);
  }
  if (exact) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (p[0](i, i) == cplx(1.0, 0.0)) cols.push_back(i);
    }
    out.rank = static_cast<int>(cols.size());
    CMat frame = CMat::Zero(dim, out.rank);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      frame(cols[i], static_cast<Eigen::Index>(i)) = cplx(1.0, 0.0);
    }
    out.frames.assign(p.size(), frame);
    return out;
  }

  out.frames.resize(p.size());
  for (std::size_t g = 0; g < p.size(); ++g) {
    const CMat sym = 0.5 * (p[g] + p[g].adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(sym);
    int rank = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (solver.eigenvalues()(i) > 0.5) ++rank;
    }
    if (g == 0) {
      out.rank = rank;
    } else if (rank != out.rank) {
      throw RankJumpError("corner_frame: projection rank varies");
    }
    const CMat frame = solver.eigenvectors().rightCols(rank);
    if (g == 0 || rank == 0) {
      out.frames[g] = frame;
      continue;
    }
    // Orthogonal Procrustes against the previous aligned frame keeps the
    // gauge continuous; a small singular value means the two eigenbases
    // are genuinely ambiguous between fibers.
    const CMat overlap = frame.adjoint() * out.frames[g - 1];
    Eigen::JacobiSVD<CMat> svd(overlap,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(out.rank - 1) < 0.5) {
      throw SubprojectionFailureError(
          "corner_frame: frame alignment is ambiguous");
    }
    out.frames[g] = frame * (svd.matrixU() * svd.matrixV().adjoint());
  }
  if (p.size() > 1 && out.rank > 0) {
    out.alignment_defect = operator_norm(
        CMat(out.frames.back().adjoint() * out.frames.front() -
             identity(out.rank)));
  }
  return out;
}

Fibers raw_rank1(const Fibers& p, double tol) {
  if (p.empty()) throw SizeMismatchError("rank1_subprojection: no fibers");
  require_projection_fibers(p, tol, "rank1_subprojection");
  const Eigen::Index dim = p[0].rows();

  bool exact = is_exact_diagonal_projection(p[0]);
  for (std::size_t g = 1; exact && g < p.size(); ++g) {
    exact = same_matrix_bits(p[g], p[0]);
  }
  if (exact) {
    Eigen::Index lead = -1;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (p[0](i, i) == cplx(1.0, 0.0)) {
        lead = i;
        break;
      }
    }
    if (lead < 0) {
      throw SubprojectionFailureError(
          "rank1_subprojection of the zero projection");
    }
    CMat unit = CMat::Zero(dim, dim);
    unit(lead, lead) = cplx(1.0, 0.0);
    return Fibers(p.size(), unit);
  }

  // Track a single line fiber to fiber: project the previous unit vector
  // into the current range and renormalize.  The projector f f^* is phase
  // invariant, so any phase drift of the tracked vector is harmless.
  Eigen::SelfAdjointEigenSolver<CMat> solver(0.5 * (p[0] + p[0].adjoint()));
  if (solver.eigenvalues()(dim - 1) < 0.5) {
    throw SubprojectionFailureError(
        "rank1_subprojection of the zero projection");
  }
  CVec start = solver.eigenvectors().col(dim - 1);
  Fibers out(p.size());
  out[0] = start * start.adjoint();
  CVec prev = start;
  for (std::size_t g = 1; g < p.size(); ++g) {
    CVec cur = p[g] * prev;
    const double len = cur.norm();
    if (len < 0.5) {
      throw SubprojectionFailureError(
          "rank1_subprojection tracking lost the line");
    }
    cur /= len;
    out[g] = cur * cur.adjoint();
    prev = cur;
  }
  if (p.size() > 1 && std::abs(start.dot(prev)) < 0.5) {
    throw SubprojectionFailureError(
        "rank1_subprojection line is not periodic");
  }
  return out;
}

Fibers raw_winding_rep(const Fibers& p, const Fibers& p1, long long c,
                       const BaseAlgebra& base) {
  if (c == 0) return p;
  if (!base.is_circle()) {
    throw ConfigError("nonzero corner winding needs a circle base");
  }
  Fibers out(p.size());
  for (std::size_t g = 0; g < p.size(); ++g) {
    const cplx phase =
        std::exp(cplx(0.0, static_cast<double>(c) *
                               base.angle(static_cast<int>(g))));
    out[g] = p[g] + (phase - cplx(1.0, 0.0)) * p1[g];
  }
  return out;
}

// Skew logarithm with a rotated branch cut as fallback: when an eigenvalue
// sits exactly on -1, log(u e^{-i beta}) + i beta 1 is an equally valid
// logarithm of u as long as the shifted spectrum clears the cut.
CMat robust_log(const CMat& u, double tol, double branch_margin) {
  try {
    return unitary_log(u, tol, branch_margin);
  } catch (const BranchFailureError&) {
    for (const double beta : {0.5, 1.0, 2.0}) {
      try {
        const CMat shifted = std::exp(cplx(0.0, -beta)) * u;
        CMat log = unitary_log(shifted, tol, branch_margin);
        log += cplx(0.0, beta) * identity(static_cast<int>(u.rows()));
        return log;
      } catch (const BranchFailureError&) {
      }
    }
    throw;
  }
}

// Fiberwise skew logarithms of a unitary family, continuous in the fiber
// index; periodic families get one midpoint-refined retry before
// UnwrapFailure propagates (the result stays on the original grid).
Fibers raw_logs(const Fibers& m, bool circle, const RunConfig& cfg) {
  if (!circle || m.size() < 2) {
    Fibers out;
    out.reserve(m.size());
    for (const CMat& f : m) {
      out.push_back(robust_log(f, cfg.tol, cfg.branch_margin));
    }
    return out;
  }
  const std::size_t count = m.size();
  PhaseTracks tracks;
  try {
    tracks = unwrap_loop(m, kPi / 2, cfg.family_tol);
  } catch (const UnwrapFailureError&) {
    Fibers refined(2 * count);
    for (std::size_t g = 0; g < count; ++g) {
      refined[2 * g] = m[g];
      try {
        refined[2 * g + 1] =
            unitary_geodesic(m[g], m[(g + 1) % count], 0.5, cfg.tol,
                             cfg.branch_margin);
      } catch (const BranchFailureError&) {
        throw UnwrapFailureError(
            "midpoint refinement hit an antipodal step");
      }
    }
    const PhaseTracks fine = unwrap_loop(refined, kPi / 2, cfg.family_tol);
    tracks.phases.reserve(count);
    tracks.vectors.reserve(count);
    for (std::size_t g = 0; g < count; ++g) {
      tracks.phases.push_back(fine.phases[2 * g]);
      tracks.vectors.push_back(fine.vectors[2 * g]);
    }
  }
  return tracks_to_logs(tracks);
}

long long raw_winding(const Fibers& u, bool circle) {
  return circle && u.size() > 1 ? det_winding(u) : 0;
}

// --- Braided loops ---------------------------------------------------------
//
// Equal classes guarantee a connecting family even when no fiber-continuous
// logarithm of u^* v exists: around the circle, eigenvalue tracks can trade
// whole turns in opposite directions while the determinant winding stays
// put, and then every continuous choice of logarithm misses closure by a
// multiple of 2*pi.  The repair is constructive rather than spectral.  The
// elementary traded pair diag(e^{i theta}, e^{-i theta}) is null-homotopic
// through the explicit two-factor family below, so peeling one framed copy
// of it off u^* v per traded turn leaves a loop whose logarithm closes.

// exp(i * half * (sx * sigma_x + sz * sigma_z)) for a unit axis (sx, 0, sz).
CMat two_axis_rot(double half, double sx, double sz) {
  CMat out(2, 2);
  const double c = std::cos(half);
  const double s = std::sin(half);
  out(0, 0) = cplx(c, s * sz);
  out(0, 1) = cplx(0.0, s * sx);
  out(1, 0) = cplx(0.0, s * sx);
  out(1, 1) = cplx(c, -s * sz);
  return out;
}

// Contraction of the elementary traded pair: Phi(0, theta) = 1 and
// Phi(1, theta) = diag(e^{i theta}, e^{-i theta}), jointly continuous and
// 2*pi-periodic in theta for every s.  The two half-angle factors share the
// z axis at s = 1 and sit on opposite axes +-x at s = 0, where they cancel;
// a full turn of theta flips both factors by -1, so the product stays
// periodic even though neither factor is.  det Phi == 1 identically.
CMat braid_contraction(double s, double theta) {
  const double psi = 0.5 * kPi * (1.0 - s);
  return two_axis_rot(0.5 * theta, std::sin(psi), std::cos(psi)) *
         two_axis_rot(0.5 * theta, -std::sin(psi), std::cos(psi));
}

// Locates the traded turns of a unitary loop and returns one orthonormal
// pair field per unit of trade: column 0 follows the eigenline that gains a
// full turn around the loop, column 1 a line that loses one.  Empty result
// means no trade was found.  Tracked eigenvectors carry arbitrary
// per-sample phases, which V diag(e^{i phase}) V^* reconstructions never
// see but framed conjugations do, so every column is rephased against its
// predecessor before it is stored.
std::vector<std::vector<CMat>> braid_pair_frames(const Fibers& m,
                                                 const RunConfig& cfg) {
  const std::size_t count = m.size();
  Fibers extended(m.begin(), m.end());
  extended.push_back(m[0]);
  PhaseTracks tracks;
  try {
    tracks = unwrap_path(extended, kPi / 2);
  } catch (const UnwrapFailureError&) {
    Fibers refined(2 * count + 1);
    for (std::size_t g = 0; g < count; ++g) {
      refined[2 * g] = m[g];
      try {
        refined[2 * g + 1] =
            unitary_geodesic(m[g], m[(g + 1) % count], 0.5, cfg.tol,
                             cfg.branch_margin);
      } catch (const BranchFailureError&) {
        throw UnwrapFailureError(
            "midpoint refinement hit an antipodal step");
      }
    }
    refined[2 * count] = m[0];
    const PhaseTracks fine = unwrap_path(refined, kPi / 2);
    tracks.phases.reserve(count + 1);
    tracks.vectors.reserve(count + 1);
    for (std::size_t g = 0; g <= count; ++g) {
      tracks.phases.push_back(fine.phases[2 * g]);
      tracks.vectors.push_back(fine.vectors[2 * g]);
    }
  }

  // The last sample repeats the first, so the end frame spans the same
  // eigenlines as the start frame.  Matching ends onto starts by overlap
  // exposes how many whole turns each track gained on its way around.
  const Eigen::Index dim = m[0].rows();
  const RVec& start = tracks.phases.front();
  const RVec& end = tracks.phases.back();
  const CMat& vstart = tracks.vectors.front();
  const CMat& vend = tracks.vectors.back();
  struct Candidate {
    double overlap;
    Eigen::Index from;
    Eigen::Index to;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(dim * dim));
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (Eigen::Index l = 0; l < dim; ++l) {
      candidates.push_back(
          {std::abs(vstart.col(l).dot(vend.col(k))), k, l});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.overlap > b.overlap;
            });
  std::vector<Eigen::Index> matched(static_cast<std::size_t>(dim), -1);
  std::vector<bool> taken(static_cast<std::size_t>(dim), false);
  for (const Candidate& c : candidates) {
    if (matched[static_cast<std::size_t>(c.from)] >= 0 ||
        taken[static_cast<std::size_t>(c.to)]) {
      continue;
    }
    if (c.overlap < 0.5) {
      throw UnwrapFailureError(
          "braided loop: end eigenframe does not match its start");
    }
    matched[static_cast<std::size_t>(c.from)] = c.to;
    taken[static_cast<std::size_t>(c.to)] = true;
  }

  std::vector<Eigen::Index> gained;
  std::vector<Eigen::Index> lost;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double diff =
        end[k] - start[matched[static_cast<std::size_t>(k)]];
    const long long turns = std::llround(diff / (2.0 * kPi));
    if (std::abs(diff - 2.0 * kPi * static_cast<double>(turns)) > 0.3) {
      throw UnwrapFailureError(
          "braided loop: traded turns are not whole");
    }
    for (long long r = 0; r < turns; ++r) gained.push_back(k);
    for (long long r = 0; r < -turns; ++r) lost.push_back(k);
  }
  if (gained.size() != lost.size()) {
    throw UnwrapFailureError(
        "braided loop: traded turns do not cancel");
  }

  std::vector<std::vector<CMat>> frames(gained.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i].resize(count);
    for (std::size_t g = 0; g < count; ++g) {
      CMat f(dim, 2);
      f.col(0) = tracks.vectors[g].col(gained[i]);
      f.col(1) = tracks.vectors[g].col(lost[i]);
      if (g > 0) {
        for (int c = 0; c < 2; ++c) {
          const cplx overlap = frames[i][g - 1].col(c).dot(f.col(c));
          if (std::abs(overlap) > cfg.tol) {
            f.col(c) *= std::conj(overlap) / std::abs(overlap);
          }
        }
      }
      frames[i][g] = f;
    }
  }
  return frames;
}

// Completion of a partial isometry to a class-zero unitary, per the
// complement construction: v_perp = (range + u) w with u a corner winding
// representative of class -[v + w] in the complement of the range.
struct RawCompletion {
  Fibers v_perp;
  Fibers completed;
  long long class_vw = 0;
  long long class_completed = 0;
};

RawCompletion raw_complete(const Fibers& v, const Fibers& range,
                           const Fibers& w, const BaseAlgebra& base,
                           const RunConfig& cfg) {
  const std::size_t count = v.size();
  const Eigen::Index dim = v[0].rows();
  const bool circle = base.is_circle() && count > 1;

  Fibers vw(count);
  double vw_defect = 0.0;
  for (std::size_t g = 0; g < count; ++g) {
    vw[g] = v[g] + w[g];
    vw_defect = std::max(vw_defect, unitarity_defect(vw[g]));
  }
  if (vw_defect > cfg.family_tol) {
    throw PreconditionError("complement construction: v + w is not unitary");
  }

  RawCompletion out;
  out.class_vw = raw_winding(vw, circle);

  Fibers complement(count);
  for (std::size_t g = 0; g < count; ++g) {
    complement[g] = identity(dim) - range[g];
  }
  Fibers u = complement;
  if (out.class_vw != 0) {
    u = raw_winding_rep(complement, raw_rank1(complement, cfg.tol),
                        -out.class_vw, base);
  }

  out.v_perp.resize(count);
  out.completed.resize(count);
  for (std::size_t g = 0; g < count; ++g) {
    out.v_perp[g] = (range[g] + u[g]) * w[g];
    out.completed[g] = v[g] + out.v_perp[g];
  }
  out.class_completed = raw_winding(out.completed, circle);
  return out;
}

// Stage summary of a single path of unitaries: endpoint distances against
// the contracted targets and, over circle bases, constancy of the
// per-sample determinant winding.
StageVerdict path_stage(const std::string& name, const GridPath& path,
                        const RunConfig& cfg, const AlgebraElement* front,
                        const AlgebraElement* back, bool unitary_valued) {
  StageVerdict stage;
  stage.name = name;
  stage.slice_count = 1;
  stage.max_step_jump_t = path.max_step_jump();
  if (unitary_valued) {
    stage.max_unitarity_defect = path.max_unitarity_defect();
  }
  if (front != nullptr) {
    stage.endpoint_defect_first = path.front().distance(*front);
  }
  if (back != nullptr) {
    stage.endpoint_defect_last = path.back().distance(*back);
  }
  stage.endpoints_ok =
      (stage.endpoint_defect_first < 0.0 ||
       stage.endpoint_defect_first <= cfg.endpoint_tol) &&
      (stage.endpoint_defect_last < 0.0 ||
       stage.endpoint_defect_last <= cfg.endpoint_tol);
  if (unitary_valued && path.base().is_circle()) {
    stage.winding_checked = true;
    long long reference = 0;
    for (int t = 0; t <= path.resolution(); ++t) {
      const long long w = det_winding(path.sample(t).fibers());
      if (t == 0) {
        reference = w;
      } else if (w != reference) {
        stage.winding_constant = false;
      }
    }
    stage.winding_value = reference;
  }
  return stage;
}

CertParams pipeline_params(const BaseAlgebra& base, int k, int m, int n,
                           const RunConfig& cfg) {
  CertParams params;
  params.k = k;
  params.m = m;
  params.n = n;
  params.base = base;
  params.grid_t = cfg.grid_t;
  params.grid_g = base.circle_grid;
  params.grid_s = cfg.grid_s;
  params.seed = cfg.seed;
  return params;
}

}  // namespace

// ---------------------------------------------------------------------------
// Winding oracle and K invariants.
// ---------------------------------------------------------------------------

long long det_winding(const std::vector<CMat>& loop) {
  if (loop.empty()) return 0;
  const std::size_t count = loop.size();
  std::vector<double> args(count);
  for (std::size_t g = 0; g < count; ++g) {
    args[g] = std::arg(determinant(loop[g]));
  }
  // Serial accumulation keeps the result deterministic; the sum over a
  // closed loop is an integer multiple of 2*pi up to rounding noise.
  double total = 0.0;
  for (std::size_t g = 0; g < count; ++g) {
    const double delta =
        std::remainder(args[(g + 1) % count] - args[g], 2.0 * kPi);
    if (std::abs(delta) >= kPi / 2.0) {
      throw NyquistViolationError(
          "determinant phase step >= pi/2; refine the circle grid");
    }
    total += delta;
  }
  return std::llround(total / (2.0 * kPi));
}

long long det_winding(const AlgebraElement& u) {
  if (!u.base().is_circle()) {
    throw ConfigError("det_winding needs a circle-loop base");
  }
  if (u.unitarity_defect() > 1e-6) {
    throw NotUnitaryError("det_winding input");
  }
  return det_winding(u.fibers());
}

K1Class k1_class(const AlgebraElement& u, double tol) {
  if (!u.is_unitary(tol)) throw NotUnitaryError("k1_class input");
  K1Class cls;
  if (u.base().is_circle()) {
    cls.windings = {det_winding(u.fibers())};
  }
  return cls;
}

AlgebraElement k1_representative(const BaseAlgebra& base, const K1Class& cls,
                                 int amp) {
  if (amp < 1) throw ConfigError("k1_representative needs amp >= 1");
  if (!base.is_circle()) {
    if (cls.scalar() != 0) {
      throw ConfigError(
          "nontrivial K1 class over a base with trivial K1 group");
    }
    return AlgebraElement::identity(base, amp);
  }
  const long long c = cls.scalar();
  const int dim = base.dim(amp);
  return AlgebraElement::from_fibers(base, amp, [&](int g) {
    CMat fiber = identity(dim);
    fiber(0, 0) = std::exp(cplx(0.0, static_cast<double>(c) * base.angle(g)));
    return fiber;
  });
}

GridPath connect_in_u0(const AlgebraElement& u, const AlgebraElement& v,
                       int resolution, const RunConfig& cfg) {
  cfg.validate();
  if (u.base() != v.base() || u.amp() != v.amp()) {
    throw DimensionMismatchError("connect_in_u0: shapes differ");
  }
  if (resolution < 1) throw ConfigError("connect_in_u0 needs resolution >= 1");
  if (!u.is_unitary(cfg.tol)) throw NotUnitaryError("connect_in_u0: u");
  if (!v.is_unitary(cfg.tol)) throw NotUnitaryError("connect_in_u0: v");
  if (k1_class(u, cfg.tol) != k1_class(v, cfg.tol)) {
    throw ClassMismatchError("connect_in_u0: K1 classes differ");
  }

  const AlgebraElement rel = u.adjoint() * v;
  const bool circle = u.base().is_circle();
  try {
    const Fibers logs = raw_logs(rel.fibers(), circle, cfg);
    std::vector<AlgebraElement> samples;
    samples.reserve(resolution + 1);
    samples.push_back(u);
    for (int t = 1; t < resolution; ++t) {
      const double s = static_cast<double>(t) / resolution;
      samples.push_back(
          AlgebraElement::from_fibers(u.base(), u.amp(), [&](int g) {
            return CMat(u.fiber(g) * exp_skew(CMat(s * logs[g])));
          }));
    }
    samples.push_back(v);
    return GridPath(std::move(samples));
  } catch (const UnwrapFailureError&) {
    if (!circle) throw;
  }

  // The loop u^* v is braided: eigenvalue tracks traded whole turns around
  // the circle, so no continuous logarithm closes.  Peel one framed copy of
  // the elementary braid contraction off per traded turn, walk u onto the
  // peeled-off factor over the first half of the path, and finish along the
  // now-closing logarithm of the remainder.
  if (resolution < 2) {
    throw UnwrapFailureError(
        "connect_in_u0: a braided loop needs resolution >= 2");
  }
  const std::vector<std::vector<CMat>> frames =
      braid_pair_frames(rel.fibers(), cfg);
  if (frames.empty()) {
    throw UnwrapFailureError(
        "connect_in_u0: loop logarithm fails to close but no traded turns "
        "were found");
  }
  const Eigen::Index dim = rel.fiber(0).rows();
  const auto correction = [&](int g, double s) {
    CMat c = identity(dim);
    const double theta = u.base().angle(g);
    for (const std::vector<CMat>& unit : frames) {
      const CMat& f = unit[static_cast<std::size_t>(g)];
      c = CMat(c * (identity(dim) +
                    f * (braid_contraction(s, theta) - identity(2)) *
                        f.adjoint()));
    }
    return c;
  };

  // At s = 1 every peeled factor is diagonal on eigenlines of rel, so C(1)
  // commutes with rel and C(1)^* rel shifts each traded lift back by a
  // whole turn; the remainder's logarithm closes where rel's could not.
  Fibers remainder(static_cast<std::size_t>(rel.fiber_count()));
  for (int g = 0; g < rel.fiber_count(); ++g) {
    remainder[static_cast<std::size_t>(g)] =
        correction(g, 1.0).adjoint() * rel.fiber(g);
  }
  const Fibers logs = raw_logs(remainder, /*circle=*/true, cfg);

  const int half = resolution / 2;
  std::vector<AlgebraElement> samples;
  samples.reserve(resolution + 1);
  samples.push_back(u);
  for (int t = 1; t <= half; ++t) {
    const double s = static_cast<double>(t) / half;
    samples.push_back(
        AlgebraElement::from_fibers(u.base(), u.amp(), [&](int g) {
          return CMat(u.fiber(g) * correction(g, s));
        }));
  }
  for (int t = half + 1; t < resolution; ++t) {
    const double s = static_cast<double>(t - half) / (resolution - half);
    samples.push_back(
        AlgebraElement::from_fibers(u.base(), u.amp(), [&](int g) {
          return CMat(u.fiber(g) * correction(g, 1.0) *
                      exp_skew(CMat(s * logs[g])));
        }));
  }
  samples.push_back(v);
  return GridPath(std::move(samples));
}

K0Data rank_fullness(const AlgebraElement& p, double tol) {
  if (!p.is_projection(tol)) {
    throw PreconditionError("rank_fullness needs a projection");
  }
  int rank = -1;
  for (int g = 0; g < p.fiber_count(); ++g) {
    const CMat sym = 0.5 * (p.fiber(g) + p.fiber(g).adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(sym, Eigen::EigenvaluesOnly);
    int count = 0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      if (solver.eigenvalues()(i) > 0.5) ++count;
    }
    if (rank < 0) {
      rank = count;
    } else if (rank != count) {
      throw RankJumpError("projection rank varies across fibers");
    }
  }
  K0Data out;
  out.rank = rank;
  out.full = rank > 0;
  return out;
}

std::array<long long, 2> bezout(long long m, long long n) {
  if (m < 1 || n < 1) throw ConfigError("bezout needs positive arguments");
  if (std::gcd(m, n) != 1) {
    throw NotCoprimeError("bezout needs coprime arguments");
  }
  for (long long size = 0; size <= n; ++size) {
    for (const long long j : {size, -size}) {
      const long long numerator = 1 - j * m;
      if (numerator % n == 0) return {j, numerator / n};
      if (size == 0) break;
    }
  }
  throw NotCoprimeError("bezout: no coefficient found");  // unreachable
}

// ---------------------------------------------------------------------------
// Corner helpers.
// ---------------------------------------------------------------------------

AlgebraElement corner_compress(const AlgebraElement& x,
                               const AlgebraElement& p) {
  return p * (x * p);
}

K1Class corner_k1(const AlgebraElement& v, const AlgebraElement& p,
                  double tol) {
  if ((v.adjoint() * v).distance(p) > tol ||
      (v * v.adjoint()).distance(p) > tol) {
    throw NotCornerUnitaryError("corner_k1: v is not unitary over p");
  }
  const AlgebraElement extension =
      v + (AlgebraElement::identity(p.base(), p.amp()) - p);
  return k1_class(extension, tol);
}

CornerFrame corner_frame(const AlgebraElement& p, double tol) {
  return raw_corner_frame(p.fibers(), tol);
}

AlgebraElement rank1_subprojection(const AlgebraElement& p, double tol) {
  return AlgebraElement(p.base(), p.amp(), raw_rank1(p.fibers(), tol));
}

AlgebraElement corner_winding_rep(const AlgebraElement& p,
                                  const AlgebraElement& p1, long long c) {
  if (c == 0) return p;
  return AlgebraElement(p.base(), p.amp(),
                        raw_winding_rep(p.fibers(), p1.fibers(), c, p.base()));
}

AlgebraElement mvn_partial_isometry(const AlgebraElement& r0,
                                    const AlgebraElement& r1, double tol) {
  if (r0.base() != r1.base() || r0.amp() != r1.amp()) {
    throw DimensionMismatchError("mvn_partial_isometry: shapes differ");
  }
  const CornerFrame f0 = raw_corner_frame(r0.fibers(), tol);
  const CornerFrame f1 = raw_corner_frame(r1.fibers(), tol);
  if (f0.rank != f1.rank) {
    throw RankJumpError("mvn_partial_isometry needs equal ranks");
  }
  const int dim = r0.dim();
  return AlgebraElement::from_fibers(r0.base(), r0.amp(), [&](int g) {
    if (f0.rank == 0) return zero_matrix(dim);
    return CMat(f1.frames[g] * f0.frames[g].adjoint());
  });
}

PartialIsometryElement PartialIsometryElement::make(const AlgebraElement& v,
                                                    double tol) {
  PartialIsometryElement out;
  out.v = v;
  out.support = v.adjoint() * v;
  out.range = v * v.adjoint();
  if (out.support.projection_defect() > tol ||
      out.range.projection_defect() > tol) {
    throw PreconditionError(
        "partial isometry defect exceeds the tolerance");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Intertwiner pipeline (two conjugations of q into p).
// ---------------------------------------------------------------------------

namespace {

// Comparison unitary of a corrected pair and its corner data.
struct CornerSplit {
  AlgebraElement v;
  AlgebraElement v_corner;
  AlgebraElement v_complement;
  long long class_corner = 0;
  long long class_complement = 0;
  double split_defect = 0.0;
};

CornerSplit corner_split(const AlgebraElement& u0, const AlgebraElement& u1,
                         const AlgebraElement& p_big,
                         const AlgebraElement& p_comp, int m, int n,
                         const RunConfig& cfg) {
  CornerSplit out;
  out.v = u1.tensor_identity(m).adjoint() * u0.tensor_identity(n);
  out.v_corner = p_big * (out.v * p_big);
  out.v_complement = p_comp * (out.v * p_comp);
  out.split_defect = (out.v_corner + out.v_complement).distance(out.v);
  if (out.split_defect > cfg.family_tol) {
    throw PreconditionError(
        "comparison unitary does not respect the corner splitting");
  }
  out.class_corner = corner_k1(out.v_corner, p_big, cfg.tol).scalar();
  out.class_complement =
      corner_k1(out.v_complement, p_comp, cfg.tol).scalar();
  return out;
}

AlgebraElement corner_corrector(const AlgebraElement& corner, long long cls,
                                const RunConfig& cfg) {
  if (cls == 0) return corner;
  return corner_winding_rep(corner, rank1_subprojection(corner, cfg.tol),
                            cls);
}

// Contraction of a corner unitary to its corner projection, computed in a
// restricting frame and assembled back in the ambient dimension.  Endpoint
// samples are pinned to the exact compression and the exact projection.
std::vector<Fibers> corner_contraction(const AlgebraElement& v_corner,
                                       const CornerFrame& frame,
                                       int resolution, bool circle,
                                       const RunConfig& cfg) {
  const std::size_t count =
      static_cast<std::size_t>(v_corner.fiber_count());
  const int dim = v_corner.dim();
  std::vector<Fibers> samples(resolution + 1, Fibers(count));
  if (frame.rank == 0) {
    for (int t = 0; t <= resolution; ++t) {
      for (std::size_t g = 0; g < count; ++g) {
        samples[t][g] = zero_matrix(dim);
      }
    }
    return samples;
  }

  Fibers restricted(count);
  Fibers rel(count);
  Fibers projection(count);
  for (std::size_t g = 0; g < count; ++g) {
    const CMat& s = frame.frames[g];
    restricted[g] = s.adjoint() * v_corner.fiber(static_cast<int>(g)) * s;
    rel[g] = restricted[g].adjoint();
    projection[g] = s * s.adjoint();
  }
  const Fibers logs = raw_logs(rel, circle, cfg);

  for (int t = 0; t <= resolution; ++t) {
    for (std::size_t g = 0; g < count; ++g) {
      if (t == 0) {
        samples[t][g] = v_corner.fiber(static_cast<int>(g));
      } else if (t == resolution) {
        samples[t][g] = projection[g];
      } else {
        const double s = static_cast<double>(t) / resolution;
        samples[t][g] = frame.frames[g] *
                        (restricted[g] * exp_skew(CMat(s * logs[g]))) *
                        frame.frames[g].adjoint();
      }
    }
  }
  return samples;
}

}  // namespace

Lemma34Result lemma34_pipeline(const AlgebraElement& p,
                               const AlgebraElement& q,
                               const AlgebraElement& u0,
                               const AlgebraElement& u1, int m, int n,
                               const RunConfig& cfg,
                               const Lemma34Options& opts) {
  cfg.validate();
  if (m < 1 || n < 1 || std::gcd(m, n) != 1) {
    throw NotCoprimeError("lemma34 needs coprime m, n");
  }
  if (p.base() != q.base() || p.amp() != q.amp()) {
    throw DimensionMismatchError("lemma34: p, q shapes differ");
  }
  if (!p.is_projection(cfg.tol) || !q.is_projection(cfg.tol)) {
    throw PreconditionError("lemma34: p and q must be projections");
  }
  const int c0 = p.amp();
  if (u0.base() != p.base() || u1.base() != p.base() ||
      u0.amp() != c0 * m || u1.amp() != c0 * n) {
    throw DimensionMismatchError("lemma34: intertwiner shapes");
  }
  if (!u0.is_unitary(cfg.tol) || !u1.is_unitary(cfg.tol)) {
    throw NotUnitaryError("lemma34: intertwiners");
  }
  if ((u0.adjoint() * (q.tensor_identity(m) * u0))
          .distance(p.tensor_identity(m)) > cfg.tol ||
      (u1.adjoint() * (q.tensor_identity(n) * u1))
          .distance(p.tensor_identity(n)) > cfg.tol) {
    throw PreconditionError("lemma34: conjugation relations fail");
  }

  const int mn = m * n;
  const AlgebraElement p_big = p.tensor_identity(mn);
  const AlgebraElement q_big = q.tensor_identity(mn);
  const AlgebraElement one_big =
      AlgebraElement::identity(p.base(), c0 * mn);
  const AlgebraElement p_comp = one_big - p_big;

  const CornerSplit raw_split =
      corner_split(u0, u1, p_big, p_comp, m, n, cfg);
  const std::array<long long, 2> bez = bezout(m, n);

  Lemma34Result result;
  result.report.name = "lemma34";
  result.report.params = pipeline_params(p.base(), 1, m, n, cfg);
  result.report.bezout = bez;
  result.u0_corrected = u0;
  result.u1_corrected = u1;

  if (!opts.disable_correction &&
      (raw_split.class_corner != 0 || raw_split.class_complement != 0)) {
    const AlgebraElement one_small =
        AlgebraElement::identity(p.base(), c0);
    const AlgebraElement w =
        corner_corrector(p, -raw_split.class_corner, cfg) +
        corner_corrector(one_small - p, -raw_split.class_complement, cfg);
    result.u0_corrected =
        u0 * w.pow(static_cast<int>(bez[1]))
                 .oplus_identity((m - 1) * c0);
    result.u1_corrected =
        u1 * w.pow(static_cast<int>(-bez[0]))
                 .oplus_identity((n - 1) * c0);
  }

  const CornerSplit corrected = corner_split(
      result.u0_corrected, result.u1_corrected, p_big, p_comp, m, n, cfg);
  result.report.corner_classes = {raw_split.class_corner,
                                  raw_split.class_complement,
                                  corrected.class_corner,
                                  corrected.class_complement};

  if (corrected.class_corner != 0 || corrected.class_complement != 0) {
    // Obstructed: the corner loop cannot be contracted.  Report only.
    result.report.pass = false;
    return result;
  }

  // Contract both corner compressions to their corner projections and
  // assemble U_t = (u1' (x) 1_m) (V_p(t) + V_comp(t)).
  const bool circle = p.base().is_circle();
  const int t_res = cfg.grid_t;
  const CornerFrame frame_p = raw_corner_frame(p_big.fibers(), cfg.tol);
  const CornerFrame frame_c = raw_corner_frame(p_comp.fibers(), cfg.tol);
  const std::vector<Fibers> corner_path = corner_contraction(
      corrected.v_corner, frame_p, t_res, circle, cfg);
  const std::vector<Fibers> comp_path = corner_contraction(
      corrected.v_complement, frame_c, t_res, circle, cfg);

  std::vector<AlgebraElement> combined;
  combined.reserve(t_res + 1);
  for (int t = 0; t <= t_res; ++t) {
    if (t == t_res) {
      combined.push_back(one_big);
      continue;
    }
    combined.push_back(
        AlgebraElement::from_fibers(p.base(), c0 * mn, [&](int g) {
          return CMat(corner_path[t][g] + comp_path[t][g]);
        }));
  }
  const GridPath contract_path(combined);

  const AlgebraElement left = result.u1_corrected.tensor_identity(m);
  std::vector<AlgebraElement> u_samples;
  u_samples.reserve(t_res + 1);
  double conjugation = 0.0;
  for (int t = 0; t <= t_res; ++t) {
    AlgebraElement sample = left * contract_path.sample(t);
    conjugation = std::max(
        conjugation,
        (sample.adjoint() * (q_big * sample)).distance(p_big));
    u_samples.push_back(std::move(sample));
  }
  const GridPath u_path(std::move(u_samples));
  result.report.conjugation_defect = conjugation;

  const DdCheckResult dd = dd_check(u_path, m, n, cfg.boundary_tol);

  const AlgebraElement front_target =
      result.u0_corrected.tensor_identity(n);
  const AlgebraElement back_target =
      result.u1_corrected.tensor_identity(m);
  StageVerdict contract = path_stage("contract", contract_path, cfg,
                                     &corrected.v, &one_big, true);
  StageVerdict weave = path_stage("intertwine", u_path, cfg, &front_target,
                                  &back_target, true);
  weave.max_boundary_defect =
      std::max({conjugation, dd.defect_a, dd.defect_b});
  weave.slices_valid = dd.ok && conjugation <= cfg.family_tol;
  result.report.stages = {std::move(contract), std::move(weave)};
  result.report.pass = stages_pass(result.report.stages, cfg);
  result.element = dd.element;
  return result;
}

// ---------------------------------------------------------------------------
// Unitary completion of a partial isometry.
// ---------------------------------------------------------------------------

Corollary36Parts corollary36_build(const PartialIsometryElement& v,
                                   const AlgebraElement& w,
                                   const RunConfig& cfg) {
  cfg.validate();
  const AlgebraElement& p = v.support;
  const AlgebraElement& q = v.range;
  const AlgebraElement one = AlgebraElement::identity(p.base(), p.amp());
  if ((w.adjoint() * w).distance(one - p) > cfg.tol ||
      (w * w.adjoint()).distance(one - q) > cfg.tol) {
    throw PreconditionError(
        "corollary36: w must intertwine the complement projections");
  }

  const RawCompletion raw =
      raw_complete(v.v.fibers(), q.fibers(), w.fibers(), p.base(), cfg);
  Corollary36Parts parts;
  parts.v_perp = AlgebraElement(p.base(), p.amp(), raw.v_perp);
  parts.completed = AlgebraElement(p.base(), p.amp(), raw.completed);
  parts.class_vw = raw.class_vw;
  parts.class_completed = raw.class_completed;
  return parts;
}

Corollary36Result corollary36_complement(const PartialIsometryElement& v,
                                         const AlgebraElement& w,
                                         const RunConfig& cfg) {
  cfg.validate();
  const AlgebraElement one =
      AlgebraElement::identity(v.support.base(), v.support.amp());
  if (!rank_fullness(one - v.support, cfg.tol).full ||
      !rank_fullness(one - v.range, cfg.tol).full) {
    throw NotFullError("corollary36 needs full complement projections");
  }

  Corollary36Result result;
  result.parts = corollary36_build(v, w, cfg);
  if (result.parts.class_completed != 0) {
    throw ClassMismatchError(
        "corollary36: completion class failed to cancel");
  }
  result.path = connect_in_u0(result.parts.completed, one, cfg.grid_t, cfg);

  result.report.name = "corollary36";
  result.report.params = pipeline_params(v.support.base(), 1, 1, 1, cfg);
  result.report.corner_classes = {result.parts.class_vw,
                                  result.parts.class_completed};
  result.report.conjugation_defect =
      result.parts.completed.unitarity_defect();
  result.report.stages = {path_stage("contract", result.path, cfg,
                                     &result.parts.completed, &one, true)};
  result.report.pass = stages_pass(result.report.stages, cfg);
  return result;
}

// ---------------------------------------------------------------------------
// Partial isometry intertwiner through the corner algebra of q.
// ---------------------------------------------------------------------------

Theorem39Result theorem39_intertwiner(const AlgebraElement& p,
                                      const AlgebraElement& q,
                                      const AlgebraElement& v0,
                                      const AlgebraElement& v1, int m, int n,
                                      const RunConfig& cfg) {
  cfg.validate();
  if (m < 1 || n < 1 || std::gcd(m, n) != 1) {
    throw NotCoprimeError("theorem39 needs coprime m, n");
  }
  if (p.base() != q.base() || p.amp() != q.amp() ||
      v0.base() != p.base() || v1.base() != p.base()) {
    throw DimensionMismatchError("theorem39: bases differ");
  }
  const int c0 = p.amp();
  if (v0.amp() != c0 * m || v1.amp() != c0 * n) {
    throw DimensionMismatchError("theorem39: isometry amplifications");
  }
  if (!p.is_projection(cfg.tol) || !q.is_projection(cfg.tol)) {
    throw PreconditionError("theorem39: p and q must be projections");
  }
  const AlgebraElement r0 = v0 * v0.adjoint();
  const AlgebraElement r1 = v1 * v1.adjoint();
  if ((v0.adjoint() * v0).distance(p.tensor_identity(m)) > cfg.tol ||
      (v1.adjoint() * v1).distance(p.tensor_identity(n)) > cfg.tol ||
      (q.tensor_identity(m) * r0).distance(r0) > cfg.tol ||
      (q.tensor_identity(n) * r1).distance(r1) > cfg.tol) {
    throw PreconditionError("theorem39: isometry relations fail");
  }

  const int mn = m * n;
  const bool circle = p.base().is_circle();
  const int t_res = cfg.grid_t;
  const AlgebraElement p_big = p.tensor_identity(mn);
  const AlgebraElement q_big = q.tensor_identity(mn);
  const AlgebraElement lower = v0.tensor_identity(n);
  const AlgebraElement upper = v1.tensor_identity(m);
  const AlgebraElement big_w = upper * lower.adjoint();
  const AlgebraElement support_amb = big_w.adjoint() * big_w;
  const AlgebraElement range_amb = big_w * big_w.adjoint();

  Theorem39Result result;
  result.report.name = "theorem39";
  result.report.params = pipeline_params(p.base(), 1, m, n, cfg);

  const CornerFrame frame = raw_corner_frame(q_big.fibers(), cfg.tol);
  if (frame.rank == 0) {
    // q vanishes, so p must too and the zero path is the whole content.
    if (rank_fullness(p, cfg.tol).rank != 0) {
      throw PreconditionError("theorem39: p exceeds a vanishing q");
    }
    result.path = GridPath::constant(
        AlgebraElement::zero(p.base(), c0 * mn), t_res);
    StageVerdict stage;
    stage.name = "intertwine";
    stage.slice_count = 1;
    stage.endpoint_defect_first = 0.0;
    stage.endpoint_defect_last = 0.0;
    result.report.stages = {stage};
    result.report.pass = stages_pass(result.report.stages, cfg);
    return result;
  }

  const std::size_t count = static_cast<std::size_t>(q_big.fiber_count());
  const auto restrict_to_frame = [&](const AlgebraElement& x) {
    Fibers out(count);
    for (std::size_t g = 0; g < count; ++g) {
      const CMat& s = frame.frames[g];
      out[g] = s.adjoint() * x.fiber(static_cast<int>(g)) * s;
    }
    return out;
  };
  const Fibers w_fib = restrict_to_frame(big_w);
  const Fibers s_fib = restrict_to_frame(support_amb);
  const Fibers r_fib = restrict_to_frame(range_amb);

  // Defect projections inside the corner algebra must leave room for the
  // complement construction.
  Fibers comp_s(count);
  Fibers comp_r(count);
  for (std::size_t g = 0; g < count; ++g) {
    comp_s[g] = identity(frame.rank) - s_fib[g];
    comp_r[g] = identity(frame.rank) - r_fib[g];
  }
  const CornerFrame frame_comp_s = raw_corner_frame(comp_s, cfg.tol);
  const CornerFrame frame_comp_r = raw_corner_frame(comp_r, cfg.tol);
  if (frame_comp_s.rank == 0 || frame_comp_r.rank == 0) {
    throw NotFullError("theorem39: defect projections are not full");
  }
  if (frame_comp_s.rank != frame_comp_r.rank) {
    throw RankJumpError("theorem39: defect projection ranks differ");
  }
  Fibers partner(count);
  for (std::size_t g = 0; g < count; ++g) {
    partner[g] = frame_comp_r.frames[g] * frame_comp_s.frames[g].adjoint();
  }

  const RawCompletion completion =
      raw_complete(w_fib, r_fib, partner, p.base(), cfg);
  if (completion.class_completed != 0) {
    throw ClassMismatchError(
        "theorem39: completion class failed to cancel");
  }
  result.report.corner_classes = {completion.class_vw,
                                  completion.class_completed};

  Fibers rel(count);
  for (std::size_t g = 0; g < count; ++g) {
    rel[g] = completion.completed[g].adjoint();
  }
  const Fibers logs = raw_logs(rel, circle, cfg);

  // Walk the corner path from the completion back to 1 while assembling
  // V_t = S U_{T-t} S^* (v0 (x) 1_n); collect the corner-side evidence on
  // the way.
  StageVerdict complement_stage;
  complement_stage.name = "complement";
  complement_stage.slice_count = 1;
  complement_stage.endpoint_defect_first = 0.0;
  complement_stage.endpoint_defect_last = 0.0;
  complement_stage.winding_checked = circle && count > 1;

  std::vector<AlgebraElement> v_samples(t_res + 1);
  Fibers previous;
  long long reference_winding = 0;
  for (int r = 0; r <= t_res; ++r) {
    Fibers corner(count);
    for (std::size_t g = 0; g < count; ++g) {
      if (r == 0) {
        corner[g] = completion.completed[g];
      } else if (r == t_res) {
        corner[g] = identity(frame.rank);
      } else {
        const double s = static_cast<double>(r) / t_res;
        corner[g] = completion.completed[g] * exp_skew(CMat(s * logs[g]));
      }
      complement_stage.max_unitarity_defect =
          std::max(complement_stage.max_unitarity_defect,
                   unitarity_defect(corner[g]));
      if (r > 0) {
        complement_stage.max_step_jump_t =
            std::max(complement_stage.max_step_jump_t,
                     operator_norm(CMat(corner[g] - previous[g])));
      }
    }
    if (complement_stage.winding_checked) {
      const long long w = det_winding(corner);
      if (r == 0) {
        reference_winding = w;
      } else if (w != reference_winding) {
        complement_stage.winding_constant = false;
      }
    }
    v_samples[t_res - r] =
        AlgebraElement::from_fibers(p.base(), c0 * mn, [&](int g) {
          return CMat(frame.frames[g] * corner[g] *
                      frame.frames[g].adjoint() * lower.fiber(g));
        });
    previous = std::move(corner);
  }
  complement_stage.winding_value = reference_winding;
  result.path = GridPath(std::move(v_samples));

  // Partial isometry evidence: support held exactly at p (x) 1_mn, range
  // dominated by q (x) 1_mn (most negative eigenvalue of the difference).
  StageVerdict weave;
  weave.name = "intertwine";
  weave.slice_count = 1;
  weave.max_step_jump_t = result.path.max_step_jump();
  double support_defect = 0.0;
  double range_defect = 0.0;
  for (int t = 0; t <= t_res; ++t) {
    const AlgebraElement& sample = result.path.sample(t);
    support_defect = std::max(
        support_defect, (sample.adjoint() * sample).distance(p_big));
    const AlgebraElement gap =
        q_big - sample * sample.adjoint();
    for (int g = 0; g < sample.fiber_count(); ++g) {
      const CMat sym = 0.5 * (gap.fiber(g) + gap.fiber(g).adjoint());
      Eigen::SelfAdjointEigenSolver<CMat> solver(sym,
                                                 Eigen::EigenvaluesOnly);
      range_defect =
          std::max(range_defect, std::max(0.0, -solver.eigenvalues()(0)));
    }
  }
  weave.max_unitarity_defect = support_defect;
  weave.max_boundary_defect = range_defect;
  weave.endpoint_defect_first = result.path.front().distance(lower);
  weave.endpoint_defect_last = result.path.back().distance(upper);
  weave.endpoints_ok =
      weave.endpoint_defect_first <= cfg.endpoint_tol &&
      weave.endpoint_defect_last <= cfg.endpoint_tol;
  result.report.conjugation_defect = support_defect;

  result.report.stages = {std::move(complement_stage), std::move(weave)};
  result.report.pass = stages_pass(result.report.stages, cfg);
  return result;
}

// ---------------------------------------------------------------------------
// Demo fixtures.
// ---------------------------------------------------------------------------

namespace {

void require_demo_base(const BaseAlgebra& base, long long winding) {
  if (base.fiber_size != 4) {
    throw ConfigError("demo fixtures need a base with fibers of size 4");
  }
  if (winding != 0 && !base.is_circle()) {
    throw ConfigError("injected windings need a circle-loop base");
  }
}

}  // namespace

Lemma34Fixture lemma34_demo_fixture(const BaseAlgebra& base, int m, int n,
                                    long long injected_winding,
                                    const RunConfig& cfg) {
  cfg.validate();
  require_demo_base(base, injected_winding);
  if (m < 1 || n < 1 || std::gcd(m, n) != 1) {
    throw NotCoprimeError("lemma34 fixture needs coprime m, n");
  }

  Lemma34Fixture fixture;
  fixture.m = m;
  fixture.n = n;
  CMat proj = zero_matrix(4);
  proj(0, 0) = cplx(1.0, 0.0);
  proj(1, 1) = cplx(1.0, 0.0);
  fixture.p = AlgebraElement::constant(base, 1, proj);
  fixture.q = fixture.p;

  // Constant block-diagonal frames keep the conjugation relations exact;
  // the Bezout-split winding twists sit on the first support coordinate so
  // that the comparison unitary carries exactly the injected corner class.
  SeededRng rng(cfg.seed);
  const auto block_unitary = [&rng](int slots) {
    CMat out = zero_matrix(4 * slots);
    for (int s = 0; s < slots; ++s) {
      out.block(4 * s, 4 * s, 2, 2) = rng.random_unitary(2);
      out.block(4 * s + 2, 4 * s + 2, 2, 2) = rng.random_unitary(2);
    }
    return out;
  };
  const CMat c0 = block_unitary(m);
  const CMat c1 = block_unitary(n);
  const std::array<long long, 2> bez = bezout(m, n);
  const double twist0 =
      static_cast<double>(bez[1] * injected_winding);       // k * c
  const double twist1 =
      static_cast<double>(-bez[0] * injected_winding);      // -j * c
  fixture.u0 = AlgebraElement::from_fibers(base, m, [&](int g) {
    CMat fiber = c0;
    fiber.col(0) *= std::exp(cplx(0.0, twist0 * base.angle(g)));
    return fiber;
  });
  fixture.u1 = AlgebraElement::from_fibers(base, n, [&](int g) {
    CMat fiber = c1;
    fiber.col(0) *= std::exp(cplx(0.0, twist1 * base.angle(g)));
    return fiber;
  });
  return fixture;
}

Corollary36Fixture corollary36_demo_fixture(const BaseAlgebra& base,
                                            long long injected_winding,
                                            const RunConfig& cfg) {
  cfg.validate();
  require_demo_base(base, injected_winding);

  // The winding entry and its partner sit on crossed matrix units, so the
  // completed unitary is a Hermitian symmetry with constant eigenphases
  // {0, pi}: its eigenprojections are periodic and the single-logarithm
  // path to the identity exists for every injected class.
  AlgebraElement v_elem =
      AlgebraElement::from_fibers(base, 1, [&](int g) {
        CMat fiber = zero_matrix(4);
        fiber(2, 0) = std::exp(
            cplx(0.0, static_cast<double>(injected_winding) *
                          base.angle(g)));
        fiber(3, 1) = cplx(1.0, 0.0);
        return fiber;
      });
  CMat partner = zero_matrix(4);
  partner(0, 2) = cplx(1.0, 0.0);
  partner(1, 3) = cplx(1.0, 0.0);

  Corollary36Fixture fixture;
  fixture.v = PartialIsometryElement::make(v_elem, cfg.tol);
  fixture.w = AlgebraElement::constant(base, 1, partner);
  return fixture;
}

Theorem39Fixture theorem39_demo_fixture(const BaseAlgebra& base, int m, int n,
                                        const RunConfig& cfg) {
  cfg.validate();
  require_demo_base(base, 0);
  if (m < 1 || n < 1 || std::gcd(m, n) != 1) {
    throw NotCoprimeError("theorem39 fixture needs coprime m, n");
  }
  if (m > 3 || n > 3) {
    throw ConfigError("theorem39 fixture supports m, n <= 3");
  }

  Theorem39Fixture fixture;
  fixture.m = m;
  fixture.n = n;
  CMat proj = zero_matrix(4);
  proj(0, 0) = cplx(1.0, 0.0);
  fixture.p = AlgebraElement::constant(base, 1, proj);
  CMat dominating = zero_matrix(4);
  dominating(0, 0) = cplx(1.0, 0.0);
  dominating(1, 1) = cplx(1.0, 0.0);
  dominating(2, 2) = cplx(1.0, 0.0);
  fixture.q = AlgebraElement::constant(base, 1, dominating);

  // Coordinate partial isometries: slot j of p (x) 1 is carried onto the
  // j-th row of the first fiber block, which q dominates for j < 3.
  const auto coordinate_isometry = [&](int slots) {
    CMat out = zero_matrix(4 * slots);
    for (int j = 0; j < slots; ++j) {
      out(j, 4 * j) = cplx(1.0, 0.0);
    }
    return out;
  };
  fixture.v0 =
      AlgebraElement::constant(base, m, coordinate_isometry(m));
  fixture.v1 =
      AlgebraElement::constant(base, n, coordinate_isometry(n));
  return fixture;
}

}  // namespace dimdrop
