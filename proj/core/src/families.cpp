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

#include "dimdrop/families.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "dimdrop/errors.hpp"

namespace dimdrop {

namespace {

constexpr double kPi = std::numbers::pi;

bool same_matrix_bits(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != b(i, j)) return false;
    }
  }
  return true;
}

int rounded(double x) { return static_cast<int>(std::llround(x)); }

}  // namespace

// ---------------------------------------------------------------------------
// Seeded test vectors.
// ---------------------------------------------------------------------------

AlgebraElement sample_unitary(const BaseAlgebra& base, int amp,
                              SeededRng& rng) {
  if (amp < 1) throw ConfigError("sample_unitary needs amp >= 1");
  const int dim = base.dim(amp);
  if (!base.is_circle()) {
    return AlgebraElement::constant(base, amp, rng.random_unitary(dim));
  }
  // Smooth loop: constant frame, integer-exponent eigenphases. Small
  // exponents keep adjacent fibers close and the winding well resolved.
  const CMat c0 = rng.random_unitary(dim);
  const CMat frame = rng.random_unitary(dim);
  std::vector<int> exponents(dim);
  for (int l = 0; l < dim; ++l) {
    exponents[l] = static_cast<int>(std::floor(rng.uniform() * 5.0)) - 2;
  }
  return AlgebraElement::from_fibers(base, amp, [&](int g) {
    const double theta = base.angle(g);
    CVec diag(dim);
    for (int l = 0; l < dim; ++l) {
      diag[l] = std::exp(cplx(0.0, exponents[l] * theta));
    }
    return CMat(c0 * frame * diag.asDiagonal() * frame.adjoint());
  });
}

AlgebraElement winding_loop(const BaseAlgebra& base, int amp, long long c) {
  const int dim = base.dim(amp);
  if (!base.is_circle()) return AlgebraElement::identity(base, amp);
  return AlgebraElement::from_fibers(base, amp, [&](int g) {
    CMat fiber = identity(dim);
    fiber(0, 0) = std::exp(cplx(0.0, static_cast<double>(c) * base.angle(g)));
    return fiber;
  });
}

// ---------------------------------------------------------------------------
// One-map families.
// ---------------------------------------------------------------------------

HomotopyCertificate shrink_family(const ElementaryMap& e,
                                  const AlgebraElement& u,
                                  const RunConfig& cfg) {
  cfg.validate();
  const int t_res = e.resolution();
  const int s_res = cfg.grid_s;

  std::vector<AlgebraElement> cache;
  cache.reserve(t_res + 1);
  for (int t = 0; t <= t_res; ++t) cache.push_back(e.eval(u, t));

  FamilyCertifier certifier(1, e.degree(), cfg, /*track_winding=*/true);
  certifier.begin_stage("shrink");
  certifier.expect_first(GridPath::constant(cache[0], t_res));
  certifier.expect_last(GridPath(cache));
  for (int a = 0; a <= s_res; ++a) {
    std::vector<AlgebraElement> samples;
    samples.reserve(t_res + 1);
    for (int t = 0; t <= t_res; ++t) {
      samples.push_back(
          cache[rounded(static_cast<double>(a) * t / s_res)]);
    }
    certifier.add_slice(GridPath(std::move(samples)));
  }
  certifier.end_stage();

  HomotopyCertificate cert;
  cert.name = "shrink_family";
  cert.params.k = 1;
  cert.params.m = 1;
  cert.params.n = e.degree();
  cert.params.base = u.base();
  cert.params.grid_t = t_res;
  cert.params.grid_g = u.base().circle_grid;
  cert.params.grid_s = s_res;
  cert.params.seed = cfg.seed;
  cert.stages = certifier.take_stages();
  cert.pass = stages_pass(cert.stages, cfg);
  return cert;
}

HomotopyCertificate gamma_shear(const ElementaryMap& v, const ElementaryMap& w,
                                const AlgebraElement& u,
                                const RunConfig& cfg) {
  cfg.validate();
  if (v.resolution() != w.resolution()) {
    throw DimensionMismatchError("gamma_shear needs equal resolutions");
  }
  const int t_res = w.resolution();
  const int s_res = cfg.grid_s;

  std::vector<AlgebraElement> inner;
  inner.reserve(t_res + 1);
  for (int t = 0; t <= t_res; ++t) inner.push_back(v.eval(u, t));

  FamilyCertifier certifier(1, w.degree(), cfg, /*track_winding=*/true);
  certifier.begin_stage("shear");
  certifier.expect_first(gamma_compose(v, w).image(u));
  certifier.expect_last(w.image(inner[t_res]));
  for (int a = 0; a <= s_res; ++a) {
    std::vector<AlgebraElement> samples;
    samples.reserve(t_res + 1);
    for (int t = 0; t <= t_res; ++t) {
      // Reparametrized inner time s + t(1-s); exactly t_res on the t = 1
      // edge for every slice, so that column is pinned bitwise.
      const int idx = rounded(
          static_cast<double>(a * t_res + t * (s_res - a)) / s_res);
      samples.push_back(w.eval(inner[idx], t));
    }
    certifier.add_slice(GridPath(std::move(samples)));
  }
  certifier.end_stage();

  HomotopyCertificate cert;
  cert.name = "gamma_shear";
  cert.params.k = 1;
  cert.params.m = v.degree();
  cert.params.n = w.degree();
  cert.params.base = u.base();
  cert.params.grid_t = t_res;
  cert.params.grid_g = u.base().circle_grid;
  cert.params.grid_s = s_res;
  cert.params.seed = cfg.seed;
  cert.stages = certifier.take_stages();
  cert.pass = stages_pass(cert.stages, cfg);
  return cert;
}

// ---------------------------------------------------------------------------
// Relative-endpoint homotopy.
// ---------------------------------------------------------------------------

RelEndpointFamily::RelEndpointFamily(std::vector<CMat> p, PhaseTracks tracks)
    : p_(std::move(p)), tracks_(std::move(tracks)) {
  if (p_.size() < 2 || tracks_.phases.size() != p_.size() ||
      tracks_.vectors.size() != p_.size()) {
    throw SizeMismatchError("rel-endpoint family: samples and tracks differ");
  }
}

std::vector<CMat> RelEndpointFamily::slice(double s) const {
  std::vector<CMat> out(p_.size());
  for (std::size_t t = 0; t < p_.size(); ++t) {
    // Exactly zero phases mark pinned samples (P == Q bitwise there); they
    // must come back untouched so endpoint columns stay exact.
    if (s == 0.0 || tracks_.phases[t].isZero(0.0)) {
      out[t] = p_[t];
      continue;
    }
    const Eigen::Index dim = p_[t].rows();
    CVec diag(dim);
    for (Eigen::Index l = 0; l < dim; ++l) {
      diag[l] = std::exp(cplx(0.0, s * tracks_.phases[t][l]));
    }
    out[t] = p_[t] *
             (tracks_.vectors[t] * diag.asDiagonal() *
              tracks_.vectors[t].adjoint());
  }
  return out;
}

RelEndpointFamily rel_endpoint_homotopy(const std::vector<CMat>& p,
                                        const std::vector<CMat>& q,
                                        double endpoint_tol) {
  if (p.size() != q.size() || p.size() < 2) {
    throw SizeMismatchError("rel_endpoint_homotopy: grids differ");
  }
  if (operator_norm(p.front() - q.front()) > endpoint_tol ||
      operator_norm(p.back() - q.back()) > endpoint_tol) {
    throw PreconditionError("rel_endpoint_homotopy: endpoints differ");
  }
  const std::size_t count = p.size();
  std::vector<CMat> mids(count);
  for (std::size_t t = 0; t < count; ++t) mids[t] = p[t].adjoint() * q[t];

  PhaseTracks tracks;
  try {
    tracks = unwrap_path(mids, kPi / 2);
  } catch (const UnwrapFailureError&) {
    // Branch decisions get one retry on a midpoint-doubled grid of P and Q;
    // the output stays on the original grid so family resolutions never
    // change under the caller.
    std::vector<CMat> refined(2 * count - 1);
    for (std::size_t t = 0; t < count; ++t) refined[2 * t] = mids[t];
    for (std::size_t t = 0; t + 1 < count; ++t) {
      try {
        const CMat pm = unitary_geodesic(p[t], p[t + 1], 0.5);
        const CMat qm = unitary_geodesic(q[t], q[t + 1], 0.5);
        refined[2 * t + 1] = pm.adjoint() * qm;
      } catch (const BranchFailureError&) {
        throw UnwrapFailureError(
            "midpoint refinement hit an antipodal step; grid too coarse");
      }
    }
    const PhaseTracks fine = unwrap_path(refined, kPi / 2);
    tracks.phases.resize(count);
    tracks.vectors.resize(count);
    for (std::size_t t = 0; t < count; ++t) {
      tracks.phases[t] = fine.phases[2 * t];
      tracks.vectors[t] = fine.vectors[2 * t];
    }
  }

  // Pin samples where the two paths agree bitwise (endpoints in particular).
  for (std::size_t t = 0; t < count; ++t) {
    if (same_matrix_bits(p[t], q[t])) {
      tracks.phases[t].setZero();
      tracks.vectors[t] = identity(p[t].rows());
    }
  }
  return RelEndpointFamily(p, tracks);
}

// ---------------------------------------------------------------------------
// Homotopy through elementary maps.
// ---------------------------------------------------------------------------

namespace {

double sequence_distance(const PathSequence& x, const PathSequence& y) {
  double worst = 0.0;
  for (int j = 1; j <= x.degree(); ++j) {
    for (int t = 0; t <= x.resolution(); ++t) {
      worst = std::max(worst, operator_norm(x.at(j, t) - y.at(j, t)));
    }
  }
  return worst;
}

void feed_sequence_stage(StageVerdict& stage, const PathSequence& seq,
                         const RunConfig& cfg) {
  const PathSequence::Defects defects = seq.validate();
  stage.max_unitarity_defect =
      std::max(stage.max_unitarity_defect, defects.unitarity);
  stage.max_boundary_defect =
      std::max(stage.max_boundary_defect,
               std::max(defects.determinant, defects.endpoint_conj));
  stage.max_step_jump_t =
      std::max(stage.max_step_jump_t, defects.max_step_jump);
  stage.slices_valid =
      stage.slices_valid && defects.worst() <= cfg.family_tol;
  ++stage.slice_count;
}

// One straighten block for a single path j: straighten_slices + 1 rows from
// the appended path P (row 0, shared with the append stage) to F's path Q
// (last row, bitwise). Interior rows ride the tracked rel-endpoint
// logarithm when its unwrap is well posed. That unwrap has a genuine blind
// spot: where the appended path meets its tail the correction P(t)^* Q(t)
// can hit an exactly degenerate eigenvalue pair at -1 whose eigenframe
// turns across the seam, and then no t-continuous logarithm exists at all.
// In that case the principal branch seeds the rows instead — discontinuous
// across the seam, which relax_block below is responsible for smoothing —
// with eigenphase branches rebalanced so the phases of each sample sum to
// zero (P and Q both have determinant one, so whole turns in the principal
// sum are branch artifacts that would bleed into interior determinants).
std::vector<std::vector<CMat>> straighten_block(const std::vector<CMat>& p,
                                                const std::vector<CMat>& q,
                                                int straighten_slices,
                                                double endpoint_tol) {
  std::vector<std::vector<CMat>> rows(straighten_slices + 1);
  rows.front() = p;
  rows.back() = q;
  if (straighten_slices < 2) return rows;
  try {
    const RelEndpointFamily tracked = rel_endpoint_homotopy(p, q, endpoint_tol);
    for (int b = 1; b < straighten_slices; ++b) {
      rows[b] = tracked.slice(static_cast<double>(b) / straighten_slices);
    }
    return rows;
  } catch (const UnwrapFailureError&) {
    // Fall through to the principal-branch seed.
  }
  for (int b = 1; b < straighten_slices; ++b) {
    rows[b].assign(p.size(), CMat());
  }
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (same_matrix_bits(p[t], q[t])) {
      for (int b = 1; b < straighten_slices; ++b) rows[b][t] = p[t];
      continue;
    }
    UnitaryEigensystem sys = eig_unitary(p[t].adjoint() * q[t]);
    int turns = rounded(sys.phases.sum() / (2.0 * kPi));
    while (turns != 0) {
      Eigen::Index l = 0;
      if (turns > 0) {
        sys.phases.maxCoeff(&l);
        sys.phases[l] -= 2.0 * kPi;
        --turns;
      } else {
        sys.phases.minCoeff(&l);
        sys.phases[l] += 2.0 * kPi;
        ++turns;
      }
    }
    for (int b = 1; b < straighten_slices; ++b) {
      const double s = static_cast<double>(b) / straighten_slices;
      CVec diag(sys.phases.size());
      for (Eigen::Index l = 0; l < sys.phases.size(); ++l) {
        diag[l] = std::exp(cplx(0.0, s * sys.phases[l]));
      }
      rows[b][t] =
          p[t] * (sys.vectors * diag.asDiagonal() * sys.vectors.adjoint());
    }
  }
  return rows;
}

}  // namespace

ElementaryFamily elementary_homotopy(const ElementaryMap& e,
                                     const ElementaryMap& f, int slice_budget,
                                     const RunConfig& cfg) {
  cfg.validate();
  if (e.degree() != f.degree() || e.resolution() != f.resolution()) {
    throw DimensionMismatchError("elementary_homotopy: shapes differ");
  }
  if (slice_budget < 2) {
    throw ConfigError("elementary_homotopy needs a slice budget of >= 2");
  }
  const int degree = e.degree();
  const int t_res = e.resolution();
  const int append_slices = slice_budget / 2;
  const int straighten_slices = slice_budget - append_slices;

  // Connectors from F_j(1) to E_j(1), reversed so tails extend E's paths
  // toward F's endpoint while staying inside H_{n,j}.
  std::vector<std::vector<CMat>> tails(degree);
  for (int j = 1; j <= degree; ++j) {
    const std::vector<CMat> h = hnj_connect(
        degree, j, f.sequence().at(j, t_res), e.sequence().at(j, t_res),
        t_res, cfg.tol, cfg.branch_margin);
    tails[j - 1].assign(h.rbegin(), h.rend());
  }

  std::vector<PathSequence> slices;
  slices.reserve(slice_budget + 1);

  // Stage (i): append. Slice 0 reproduces E bitwise (sigma = 0 keeps the
  // index map at the identity).
  for (int a = 0; a <= append_slices; ++a) {
    const double sigma = static_cast<double>(a) / append_slices;
    std::vector<std::vector<CMat>> paths(degree);
    for (int j = 1; j <= degree; ++j) {
      paths[j - 1].reserve(t_res + 1);
      for (int t = 0; t <= t_res; ++t) {
        const int r = rounded(t * (1.0 + sigma));
        paths[j - 1].push_back(r <= t_res ? e.sequence().at(j, r)
                                          : tails[j - 1][r - t_res]);
      }
    }
    slices.emplace_back(degree, t_res, std::move(paths));
  }

  // Stage (ii): straighten the appended paths onto F's with endpoints fixed.
  // Tracked logarithms seed each block; where tracking is structurally
  // impossible the principal branch seeds it instead, and the pinned
  // relaxation smooths whatever seam either seed leaves. The t target takes
  // a factor-of-four headroom under the stage budget because consumers
  // sandwich these sequences around a fixed unitary, which can amplify a
  // parameter step that much before the family-level audit sees it.
  const double t_target =
      0.2 * cfg.lipschitz_t / static_cast<double>(cfg.grid_t);
  const double s_target =
      straighten_slices > 1
          ? 0.85 * cfg.lipschitz_s / static_cast<double>(straighten_slices - 1)
          : std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::vector<CMat>>> blocks;
  blocks.reserve(degree);
  for (int j = 1; j <= degree; ++j) {
    blocks.push_back(straighten_block(slices[append_slices].path(j),
                                      f.sequence().path(j), straighten_slices,
                                      cfg.endpoint_tol));
    relax_unitary_grid(&blocks.back(), /*periodic_cols=*/false, s_target,
                       t_target);
  }
  for (int b = 1; b <= straighten_slices; ++b) {
    std::vector<std::vector<CMat>> paths(degree);
    for (int j = 1; j <= degree; ++j) {
      paths[j - 1] = std::move(blocks[j - 1][b]);
    }
    slices.emplace_back(degree, t_res, std::move(paths));
  }

  // Sequence-level certificate: every slice is held to the path sequence
  // invariants, not to dimension drop structure (there is none here).
  StageVerdict append_stage;
  append_stage.name = "append";
  append_stage.endpoint_defect_first =
      sequence_distance(slices[0], e.sequence());
  StageVerdict straighten_stage;
  straighten_stage.name = "straighten";
  for (int a = 0; a <= append_slices; ++a) {
    feed_sequence_stage(append_stage, slices[a], cfg);
    if (a > 0) {
      append_stage.max_step_jump_s =
          std::max(append_stage.max_step_jump_s,
                   sequence_distance(slices[a - 1], slices[a]));
    }
  }
  for (int b = 1; b <= straighten_slices; ++b) {
    feed_sequence_stage(straighten_stage, slices[append_slices + b], cfg);
    straighten_stage.max_step_jump_s = std::max(
        straighten_stage.max_step_jump_s,
        sequence_distance(slices[append_slices + b - 1],
                          slices[append_slices + b]));
  }
  straighten_stage.endpoint_defect_last =
      sequence_distance(slices.back(), f.sequence());
  append_stage.endpoints_ok =
      append_stage.endpoint_defect_first <= cfg.endpoint_tol;
  straighten_stage.endpoints_ok =
      straighten_stage.endpoint_defect_last <= cfg.endpoint_tol;

  ElementaryFamily family;
  family.append_slices = append_slices;
  family.certificate.name = "elementary_homotopy";
  family.certificate.params.k = 1;
  family.certificate.params.m = 1;
  family.certificate.params.n = degree;
  family.certificate.params.grid_t = t_res;
  family.certificate.params.grid_s = slice_budget;
  family.certificate.params.seed = cfg.seed;
  family.certificate.stages = {append_stage, straighten_stage};
  family.certificate.pass = stages_pass(family.certificate.stages, cfg);
  family.slices = std::move(slices);
  return family;
}

// ---------------------------------------------------------------------------
// Prop 2.5 stages.
// ---------------------------------------------------------------------------

void eta_iota_stages(const BasicMapSpec& spec, const AlgebraElement& u,
                     int slice_budget, const RunConfig& cfg,
                     FamilyCertifier& certifier) {
  cfg.validate();
  if (spec.k != 1) {
    throw PreconditionError("eta_iota_stages requires a k = 1 basic map");
  }
  if (slice_budget < 6) {
    throw ConfigError("eta_iota_stages needs a slice budget of >= 6");
  }
  if (!u.is_unitary(cfg.tol)) {
    throw NotUnitaryError("eta_iota_stages input");
  }
  const int m = spec.m;
  const int n = spec.n;
  const int t_res = spec.w0.resolution();
  const int third = slice_budget / 3;
  const int stage_a = third;
  const int stage_b = third;
  const int stage_c = slice_budget - 2 * third;

  const DimensionDropElement eta = basic_map_eval(spec, u, cfg);
  const ElementaryMap dilate0(PathSequence::standard(m, t_res));
  const ElementaryMap dilate1(PathSequence::standard(n, t_res));

  std::vector<AlgebraElement> arg0;  // V0(u; .) samples
  std::vector<AlgebraElement> arg1;  // V1(u; .) samples
  arg0.reserve(t_res + 1);
  arg1.reserve(t_res + 1);
  for (int t = 0; t <= t_res; ++t) {
    arg0.push_back(dilate0.eval(u, t));
    arg1.push_back(dilate1.eval(u, t));
  }

  // The glue column is pinned at inner index t_res on both halves for every
  // shear slice, so one check covers the whole stage.
  {
    const AlgebraElement left = spec.w0.eval(arg0[t_res], t_res);
    const AlgebraElement right = spec.w1.eval(arg1[t_res], t_res);
    if (left.distance(right) > cfg.glue_tol) {
      throw GlueMismatchError("shear stage halves disagree at the glue");
    }
  }

  // Stage A: shear sigma from 1 (the basic map) to 0 (star of composites).
  const auto shear_index = [t_res](double sigma, int r) {
    return rounded(sigma * t_res + r * (1.0 - sigma));
  };
  certifier.begin_stage("shear");
  certifier.expect_first(eta.path);
  for (int a = 0; a <= stage_a; ++a) {
    const double sigma = 1.0 - static_cast<double>(a) / stage_a;
    std::vector<AlgebraElement> samples;
    samples.reserve(t_res + 1);
    for (int t = 0; t <= t_res; ++t) {
      if (t <= t_res / 2) {
        samples.push_back(
            spec.w0.eval(arg0[shear_index(sigma, 2 * t)], 2 * t));
      } else {
        const int r = 2 * t_res - 2 * t;
        samples.push_back(spec.w1.eval(arg1[shear_index(sigma, r)], r));
      }
    }
    certifier.add_slice(GridPath(std::move(samples)));
  }
  certifier.end_stage();

  // Stage B: straighten the second half onto the first composite through
  // the connectedness of elementary maps.
  const ElementaryMap gamma0 = gamma_compose(dilate0, spec.w0);
  const ElementaryMap gamma1 = gamma_compose(dilate1, spec.w1);
  std::vector<AlgebraElement> composite;
  composite.reserve(t_res + 1);
  for (int t = 0; t <= t_res; ++t) composite.push_back(gamma0.eval(u, t));

  const ElementaryFamily fam =
      elementary_homotopy(gamma1, gamma0, stage_b, cfg);
  certifier.begin_stage("straighten");
  for (int b = 0; b < static_cast<int>(fam.slices.size()); ++b) {
    const ElementaryMap em(fam.slices[b]);
    const AlgebraElement right_glue = em.eval(u, t_res);
    if (composite[t_res].distance(right_glue) > cfg.glue_tol) {
      throw GlueMismatchError("straighten slice detached from the glue");
    }
    std::vector<AlgebraElement> samples;
    samples.reserve(t_res + 1);
    for (int t = 0; t <= t_res; ++t) {
      if (t <= t_res / 2) {
        samples.push_back(composite[2 * t]);
      } else {
        samples.push_back(em.eval(u, 2 * t_res - 2 * t));
      }
    }
    certifier.add_slice(GridPath(std::move(samples)));
  }
  certifier.end_stage();

  // Stage C: shrink the composite loop back to the constant embedding.
  certifier.begin_stage("shrink");
  for (int a = 0; a <= stage_c; ++a) {
    const double sigma = 1.0 - static_cast<double>(a) / stage_c;
    std::vector<AlgebraElement> samples;
    samples.reserve(t_res + 1);
    for (int t = 0; t <= t_res; ++t) {
      const int reach = std::min(2 * t, 2 * t_res - 2 * t);
      samples.push_back(composite[rounded(sigma * reach)]);
    }
    certifier.add_slice(GridPath(std::move(samples)));
  }
  certifier.expect_last(
      GridPath::constant(u.tensor_identity(m * n), t_res));
  certifier.end_stage();
}

HomotopyCertificate eta_iota_certificate(const BasicMapSpec& spec,
                                         const AlgebraElement& u,
                                         const RunConfig& cfg) {
  FamilyCertifier certifier(spec.m, spec.n, cfg, /*track_winding=*/true);
  eta_iota_stages(spec, u, cfg.grid_s, cfg, certifier);

  HomotopyCertificate cert;
  cert.name = "eta_iota";
  cert.params.k = spec.k;
  cert.params.m = spec.m;
  cert.params.n = spec.n;
  cert.params.base = u.base();
  cert.params.grid_t = spec.w0.resolution();
  cert.params.grid_g = u.base().circle_grid;
  cert.params.grid_s = cfg.grid_s;
  cert.params.seed = cfg.seed;
  cert.stages = certifier.take_stages();
  cert.pass = stages_pass(cert.stages, cfg);
  return cert;
}

// ---------------------------------------------------------------------------
// Cor 2.6 machinery.
// ---------------------------------------------------------------------------

AlgebraElement FlipUntwist::psi(const AlgebraElement& v, int index) const {
  const AlgebraElement big = mu_k(v, k);
  const int inner = big.dim() / (k * k);
  const CMat conj = tensor_product(identity(inner), path.at(index));
  const CMat conj_adj = conj.adjoint();
  return AlgebraElement::from_fibers(big.base(), big.amp(), [&](int g) {
    return CMat(conj * big.fiber(g) * conj_adj);
  });
}

FlipUntwist flip_untwist(int k, int resolution) {
  if (k < 1) throw ConfigError("flip_untwist needs k >= 1");
  if (resolution < 2) throw ConfigError("flip_untwist needs resolution >= 2");
  FlipUntwist out;
  out.k = k;
  CMat swap = zero_matrix(k * k);
  for (int b = 0; b < k; ++b) {
    for (int mu = 0; mu < k; ++mu) {
      swap(b * k + mu, mu * k + b) = cplx(1.0, 0.0);
    }
  }
  out.swap = swap;

  // The swap has eigenvalues +-1, so a direct geodesic to 1 would sit on the
  // log branch cut. Ramp a global phase to i*swap first (harmless under
  // conjugation), then descend; the remaining eigenphases are +-pi/2.
  const CMat lifted = cplx(0.0, 1.0) * swap;
  out.path.reserve(resolution + 1);
  for (int i = 0; i <= resolution; ++i) {
    const double tau = static_cast<double>(i) / resolution;
    if (tau <= 0.5) {
      out.path.push_back(CMat(std::exp(cplx(0.0, kPi * tau)) * swap));
      continue;
    }
    const double r = (tau - 0.5) * 2.0;
    CMat step;
    try {
      step = unitary_geodesic(lifted, identity(k * k), r);
    } catch (const BranchFailureError&) {
      const CMat waypoint = std::exp(cplx(0.0, kPi / 4)) * identity(k * k);
      step = r <= 0.5 ? unitary_geodesic(lifted, waypoint, 2.0 * r)
                      : unitary_geodesic(waypoint, identity(k * k),
                                         2.0 * r - 1.0);
    }
    out.path.push_back(step);
  }
  out.path.front() = swap;
  out.path.back() = identity(k * k);
  return out;
}

CMat exchange_legs(const CMat& x, int a, int b, int d) {
  const int dim = a * b * d;
  if (x.rows() != dim || x.cols() != dim) {
    throw DimensionMismatchError("exchange_legs: dimension is not a*b*d");
  }
  std::vector<int> perm(dim);
  for (int alpha = 0; alpha < a; ++alpha) {
    for (int beta = 0; beta < b; ++beta) {
      for (int i = 0; i < d; ++i) {
        perm[(alpha * b + beta) * d + i] = (beta * a + alpha) * d + i;
      }
    }
  }
  CMat out(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) {
      out(perm[r], perm[c]) = x(r, c);
    }
  }
  return out;
}

AlgebraElement exchange_outer_pair(const AlgebraElement& x, int a, int b,
                                   int d) {
  if (x.dim() != a * b * d) {
    throw DimensionMismatchError("exchange_outer_pair: legs do not factor");
  }
  return AlgebraElement::from_fibers(x.base(), x.amp(), [&](int g) {
    return exchange_legs(x.fiber(g), a, b, d);
  });
}

// ---------------------------------------------------------------------------
// The amplification diagram.
// ---------------------------------------------------------------------------

namespace {

// Aggregates per-sample stage ledgers: defect maxima, verdict conjunction.
// The recorded winding is the first sample's (each sample must be internally
// constant; different samples legitimately carry different classes).
void merge_stage_lists(std::vector<StageVerdict>& dst,
                       std::vector<StageVerdict>&& src) {
  if (dst.empty()) {
    dst = std::move(src);
    return;
  }
  if (dst.size() != src.size()) {
    throw SizeMismatchError("stage ledgers disagree across samples");
  }
  for (std::size_t i = 0; i < dst.size(); ++i) {
    StageVerdict& d = dst[i];
    const StageVerdict& s = src[i];
    if (d.name != s.name) {
      throw SizeMismatchError("stage names disagree across samples");
    }
    d.max_unitarity_defect =
        std::max(d.max_unitarity_defect, s.max_unitarity_defect);
    d.max_boundary_defect =
        std::max(d.max_boundary_defect, s.max_boundary_defect);
    d.max_step_jump_s = std::max(d.max_step_jump_s, s.max_step_jump_s);
    d.max_step_jump_t = std::max(d.max_step_jump_t, s.max_step_jump_t);
    d.endpoint_defect_first =
        std::max(d.endpoint_defect_first, s.endpoint_defect_first);
    d.endpoint_defect_last =
        std::max(d.endpoint_defect_last, s.endpoint_defect_last);
    d.endpoints_ok = d.endpoints_ok && s.endpoints_ok;
    d.slices_valid = d.slices_valid && s.slices_valid;
    d.winding_checked = d.winding_checked || s.winding_checked;
    d.winding_constant = d.winding_constant && s.winding_constant;
    d.slice_count = std::max(d.slice_count, s.slice_count);
  }
}

}  // namespace

DiagramCertificate diagram_certificate(const BaseAlgebra& base, int k, int m,
                                       int n, int u_samples,
                                       const RunConfig& cfg) {
  cfg.validate();
  if (u_samples < 1) {
    throw ConfigError("diagram_certificate needs at least one sample");
  }
  const int t_res = cfg.grid_t;
  const BasicMapSpec spec_k = BasicMapSpec::standard(k, m, n, t_res);
  const BasicMapSpec spec_1 = BasicMapSpec::standard(1, m, n, t_res);
  SeededRng rng(cfg.seed);

  const int flip_slices = std::max(2, cfg.grid_s / 4);
  const int eta_budget = std::max(6, cfg.grid_s - flip_slices);

  // Upper-left triangle: eta_k o mu_k agrees with the k = 1 basic map
  // sample-for-sample (the diagonal inputs and the dilation sequences are
  // the same objects), after which eta_iota carries it onto iota.
  std::vector<StageVerdict> upper;
  for (int i = 0; i < u_samples; ++i) {
    const AlgebraElement u = sample_unitary(base, 1, rng);
    FamilyCertifier certifier(m, n, cfg, /*track_winding=*/true);
    certifier.begin_stage("recognition");
    const DimensionDropElement amplified =
        basic_map_eval(spec_k, mu_k(u, k), cfg);
    const DimensionDropElement plain = basic_map_eval(spec_1, u, cfg);
    certifier.expect_first(plain.path);
    certifier.add_slice(amplified.path);
    certifier.expect_last(plain.path);
    certifier.end_stage();
    eta_iota_stages(spec_1, u, cfg.grid_s, cfg, certifier);
    merge_stage_lists(upper, certifier.take_stages());
  }

  // Lower-right triangle: mu_k o eta_k lands, after the outer tensor legs
  // are exchanged, on the k-parameter basic map over B = M_k evaluated at
  // the flipped amplification Psi(v); untwisting the flip deforms that to
  // the 1-parameter basic map over B, and eta_iota over B finishes at
  // iota_B.
  std::vector<StageVerdict> lower;
  for (int i = 0; i < u_samples; ++i) {
    const AlgebraElement v = sample_unitary(base, k, rng);
    FamilyCertifier certifier(m, n, cfg, /*track_winding=*/true);

    const DimensionDropElement eta_v = basic_map_eval(spec_k, v, cfg);
    std::vector<AlgebraElement> carried;
    carried.reserve(t_res + 1);
    for (int t = 0; t <= t_res; ++t) {
      const AlgebraElement big = mu_k(eta_v.path.sample(t), k);
      carried.push_back(
          exchange_outer_pair(big, k, m * n, big.dim() / (k * m * n)));
    }

    const FlipUntwist flip = flip_untwist(k, flip_slices);
    certifier.begin_stage("flip");
    certifier.expect_first(GridPath(std::move(carried)));
    for (int s = 0; s <= flip_slices; ++s) {
      certifier.add_slice(basic_map_eval(spec_k, flip.psi(v, s), cfg).path);
    }
    certifier.expect_last(basic_map_eval(spec_1, v, cfg).path);
    certifier.end_stage();
    eta_iota_stages(spec_1, v, eta_budget, cfg, certifier);
    merge_stage_lists(lower, certifier.take_stages());
  }

  DiagramCertificate out;
  out.upper_left.name = "diagram_upper_left";
  out.upper_left.params.k = k;
  out.upper_left.params.m = m;
  out.upper_left.params.n = n;
  out.upper_left.params.base = base;
  out.upper_left.params.grid_t = t_res;
  out.upper_left.params.grid_g = base.circle_grid;
  out.upper_left.params.grid_s = cfg.grid_s;
  out.upper_left.params.seed = cfg.seed;
  out.lower_right = out.upper_left;
  out.lower_right.name = "diagram_lower_right";
  out.upper_left.stages = std::move(upper);
  out.lower_right.stages = std::move(lower);
  out.upper_left.pass = stages_pass(out.upper_left.stages, cfg);
  out.lower_right.pass = stages_pass(out.lower_right.stages, cfg);
  out.pass = out.upper_left.pass && out.lower_right.pass;
  return out;
}

}  // namespace dimdrop
