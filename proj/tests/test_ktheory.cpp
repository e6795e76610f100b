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

#include <catch2/catch_amalgamated.hpp>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "dimdrop/errors.hpp"
#include "dimdrop/families.hpp"
#include "dimdrop/ktheory.hpp"
#include "dimdrop/rng.hpp"

using namespace dimdrop;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.grid_t = 32;
  cfg.grid_g = 16;
  cfg.grid_s = 9;
  cfg.validate();
  return cfg;
}

TEST_CASE("det winding counts explicit loops exactly", "[ktheory]") {
  const int G = 16;
  for (long long c = -3; c <= 3; ++c) {
    std::vector<CMat> loop;
    for (int g = 0; g < G; ++g) {
      CMat m(1, 1);
      m(0, 0) = std::exp(cplx(0.0, 2.0 * std::numbers::pi * c * g / G));
      loop.push_back(m);
    }
    REQUIRE(det_winding(loop) == c);
  }
}

TEST_CASE("det winding flags under-sampled loops", "[ktheory]") {
  const int G = 8;
  std::vector<CMat> loop;
  for (int g = 0; g < G; ++g) {
    CMat m(1, 1);
    m(0, 0) = std::exp(cplx(0.0, 2.0 * std::numbers::pi * 3.0 * g / G));
    loop.push_back(m);
  }
  REQUIRE_THROWS_AS(det_winding(loop), NyquistViolationError);
}

TEST_CASE("element det winding guards its preconditions", "[ktheory]") {
  SeededRng rng(5);
  const AlgebraElement flat = sample_unitary(BaseAlgebra::matrices(2), 1, rng);
  REQUIRE_THROWS_AS(det_winding(flat), ConfigError);

  const BaseAlgebra base = BaseAlgebra::circle_loops(1, 16);
  const AlgebraElement stretched =
      winding_loop(base, 1, 1) + winding_loop(base, 1, 1);
  REQUIRE_THROWS_AS(det_winding(stretched), NotUnitaryError);
}

TEST_CASE("k1 class and representative roundtrip", "[ktheory]") {
  // Winding five below needs a per-step phase under pi/2, hence the
  // generous grid.
  const BaseAlgebra base = BaseAlgebra::circle_loops(1, 64);
  const K1Class cls{{2}};
  const AlgebraElement rep = k1_representative(base, cls, 2);
  REQUIRE(rep.amp() == 2);
  REQUIRE(k1_class(rep, 1e-9) == cls);
  REQUIRE(k1_class(rep, 1e-9).scalar() == 2);

  // K1 is additive under multiplication of commuting representatives.
  const AlgebraElement sum = k1_representative(base, K1Class{{3}}, 2) * rep;
  REQUIRE(k1_class(sum, 1e-9).scalar() == 5);

  // Trivial bases carry the trivial group only.
  SeededRng rng(10);
  const AlgebraElement u = sample_unitary(BaseAlgebra::scalars(), 1, rng);
  REQUIRE(k1_class(u, 1e-9).windings.empty());
  REQUIRE(k1_representative(BaseAlgebra::scalars(), K1Class{}, 3)
              .distance(AlgebraElement::identity(BaseAlgebra::scalars(), 3)) ==
          0.0);
  REQUIRE_THROWS_AS(k1_representative(BaseAlgebra::scalars(), K1Class{{1}}, 1),
                    ConfigError);
}

TEST_CASE("connect_in_u0 joins same-class unitaries", "[ktheory]") {
  const RunConfig cfg = small_config();
  const BaseAlgebra base = BaseAlgebra::circle_loops(2, 16);
  const AlgebraElement u = winding_loop(base, 1, 1);
  SeededRng rng(21);
  const AlgebraElement c =
      AlgebraElement::constant(base, 1, rng.random_unitary(2));
  const AlgebraElement v = c * u * c.adjoint();
  REQUIRE(k1_class(v, 1e-9).scalar() == 1);

  const GridPath path = connect_in_u0(u, v, 16, cfg);
  REQUIRE(path.resolution() == 16);
  REQUIRE(path.front().distance(u) <= 1e-12);
  REQUIRE(path.back().distance(v) <= 1e-11);
  REQUIRE(path.max_unitarity_defect() <= 1e-10);

  REQUIRE_THROWS_AS(
      connect_in_u0(winding_loop(base, 1, 0), u, 16, cfg),
      ClassMismatchError);
}

TEST_CASE("connect_in_u0 contracts a braided loop", "[ktheory]") {
  // diag(e^{i theta}, e^{-i theta}) has class zero but admits no
  // fiber-continuous closed logarithm: its eigenlines trade a full turn
  // around the circle, so the connector has to take the braid route.
  const RunConfig cfg = small_config();
  const BaseAlgebra base = BaseAlgebra::circle_loops(2, 32);
  const AlgebraElement braid =
      AlgebraElement::from_fibers(base, 1, [&](int g) {
        CMat f = CMat::Zero(2, 2);
        f(0, 0) = std::polar(1.0, base.angle(g));
        f(1, 1) = std::polar(1.0, -base.angle(g));
        return f;
      });
  const AlgebraElement one = AlgebraElement::identity(base, 1);
  REQUIRE(k1_class(braid, 1e-9).scalar() == 0);

  const GridPath path = connect_in_u0(braid, one, 64, cfg);
  REQUIRE(path.front().distance(braid) == 0.0);
  REQUIRE(path.back().distance(one) == 0.0);
  REQUIRE(path.max_unitarity_defect() <= 1e-12);
  REQUIRE(path.max_step_jump() <= 0.5);

  // Every intermediate sample must stay an honest loop: small fiber steps
  // everywhere, including across the circle's wrap-around seam.
  double worst_seam = 0.0;
  for (int t = 0; t <= path.resolution(); ++t) {
    const AlgebraElement& sample = path.sample(t);
    for (int g = 0; g < sample.fiber_count(); ++g) {
      const int next = (g + 1) % sample.fiber_count();
      worst_seam = std::max(
          worst_seam,
          operator_norm(CMat(sample.fiber(next) - sample.fiber(g))));
    }
  }
  REQUIRE(worst_seam <= 0.5);
}

TEST_CASE("rank and fullness of projections", "[ktheory]") {
  const BaseAlgebra base = BaseAlgebra::matrices(3);
  CMat d = CMat::Zero(3, 3);
  d(0, 0) = cplx(1.0, 0.0);
  d(1, 1) = cplx(1.0, 0.0);
  const AlgebraElement p = AlgebraElement::constant(base, 1, d);
  const K0Data data = rank_fullness(p, 1e-9);
  REQUIRE(data.rank == 2);
  REQUIRE(data.full);

  const K0Data zero = rank_fullness(AlgebraElement::zero(base, 1), 1e-9);
  REQUIRE(zero.rank == 0);
  REQUIRE_FALSE(zero.full);

  const BaseAlgebra circle = BaseAlgebra::circle_loops(2, 8);
  const AlgebraElement jumping = AlgebraElement::from_fibers(
      circle, 1, [](int g) {
        CMat f = CMat::Zero(2, 2);
        f(0, 0) = cplx(1.0, 0.0);
        if (g >= 4) f(1, 1) = cplx(1.0, 0.0);
        return f;
      });
  REQUIRE_THROWS_AS(rank_fullness(jumping, 1e-9), RankJumpError);
}

TEST_CASE("bezout pairs are minimal with the documented tie-break",
          "[ktheory]") {
  REQUIRE(bezout(2, 3) == std::array<long long, 2>{-1, 1});
  REQUIRE(bezout(3, 4) == std::array<long long, 2>{-1, 1});
  REQUIRE(bezout(1, 5) == std::array<long long, 2>{1, 0});
  REQUIRE(bezout(1, 1) == std::array<long long, 2>{0, 1});
  REQUIRE(bezout(5, 3) == std::array<long long, 2>{-1, 2});
  REQUIRE(bezout(4, 9) == std::array<long long, 2>{-2, 1});
  REQUIRE_THROWS_AS(bezout(2, 4), NotCoprimeError);
}

TEST_CASE("corner frames span exact and conjugated projections",
          "[ktheory]") {
  const BaseAlgebra base = BaseAlgebra::circle_loops(4, 16);
  CMat d = CMat::Zero(4, 4);
  d(0, 0) = cplx(1.0, 0.0);
  d(1, 1) = cplx(1.0, 0.0);
  const AlgebraElement p = AlgebraElement::constant(base, 1, d);

  const CornerFrame exact = corner_frame(p, 1e-9);
  REQUIRE(exact.rank == 2);
  REQUIRE(exact.alignment_defect == 0.0);
  REQUIRE(exact.frames.size() == 16);
  REQUIRE(exact.frames[0](0, 0) == cplx(1.0, 0.0));
  REQUIRE(exact.frames[0](1, 1) == cplx(1.0, 0.0));

  SeededRng rng(6);
  const AlgebraElement c =
      AlgebraElement::constant(base, 1, rng.random_unitary(4));
  const AlgebraElement rotated = c * p * c.adjoint();
  const CornerFrame general = corner_frame(rotated, 1e-9);
  REQUIRE(general.rank == 2);
  REQUIRE(general.alignment_defect < 1e-8);
  for (const CMat& f : general.frames) {
    REQUIRE(operator_norm(CMat(f.adjoint() * f) - identity(2)) < 1e-12);
  }
  // Frame columns span range(p): p f == f.
  REQUIRE(operator_norm(CMat(rotated.fiber(3) * general.frames[3]) -
                        general.frames[3]) < 1e-10);
}

TEST_CASE("rank one subprojections and corner windings", "[ktheory]") {
  const BaseAlgebra base = BaseAlgebra::circle_loops(4, 16);
  CMat d = CMat::Zero(4, 4);
  d(1, 1) = cplx(1.0, 0.0);
  d(2, 2) = cplx(1.0, 0.0);
  const AlgebraElement p = AlgebraElement::constant(base, 1, d);

  const AlgebraElement p1 = rank1_subprojection(p, 1e-9);
  REQUIRE(p1.projection_defect() <= 1e-12);
  REQUIRE(rank_fullness(p1, 1e-9).rank == 1);
  // Subprojection: p p1 = p1; for the exact diagonal case it is the leading
  // matrix unit of the corner.
  REQUIRE((p * p1).distance(p1) <= 1e-12);
  REQUIRE(p1.fiber(0)(1, 1) == cplx(1.0, 0.0));

  const AlgebraElement v = corner_winding_rep(p, p1, 3);
  REQUIRE((v.adjoint() * v).distance(p) <= 1e-12);
  REQUIRE(corner_k1(v, p, 1e-8).scalar() == 3);
  REQUIRE(corner_k1(p, p, 1e-8).scalar() == 0);
  REQUIRE_THROWS_AS(corner_k1(p1, p, 1e-8), NotCornerUnitaryError);
}

TEST_CASE("murray-von neumann intertwiners match ranks", "[ktheory]") {
  const BaseAlgebra base = BaseAlgebra::matrices(4);
  auto unit = [&](int i) {
    CMat m = CMat::Zero(4, 4);
    m(i, i) = cplx(1.0, 0.0);
    return AlgebraElement::constant(base, 1, m);
  };
  const AlgebraElement r0 = unit(0);
  const AlgebraElement r1 = unit(2);
  const AlgebraElement w = mvn_partial_isometry(r0, r1, 1e-9);
  REQUIRE((w.adjoint() * w).distance(r0) <= 1e-12);
  REQUIRE((w * w.adjoint()).distance(r1) <= 1e-12);

  const AlgebraElement r2 = unit(1) + unit(2);
  REQUIRE_THROWS_AS(mvn_partial_isometry(r0, r2, 1e-9), RankJumpError);
}

TEST_CASE("partial isometry elements freeze support and range", "[ktheory]") {
  const BaseAlgebra base = BaseAlgebra::matrices(3);
  CMat m = CMat::Zero(3, 3);
  m(2, 0) = cplx(1.0, 0.0);
  const PartialIsometryElement v =
      PartialIsometryElement::make(AlgebraElement::constant(base, 1, m), 1e-9);
  REQUIRE(v.support.fiber(0)(0, 0) == cplx(1.0, 0.0));
  REQUIRE(v.range.fiber(0)(2, 2) == cplx(1.0, 0.0));

  CMat bad = CMat::Zero(3, 3);
  bad(0, 0) = cplx(0.5, 0.0);
  REQUIRE_THROWS_AS(PartialIsometryElement::make(
                        AlgebraElement::constant(base, 1, bad), 1e-9),
                    PreconditionError);
}

TEST_CASE("lemma 3.4 pipeline cancels the injected corner class",
          "[ktheory][pipeline]") {
  const RunConfig cfg = small_config();
  const BaseAlgebra base = BaseAlgebra::circle_loops(4, cfg.grid_g);
  const Lemma34Fixture fx = lemma34_demo_fixture(base, 2, 3, 1, cfg);
  const Lemma34Result res =
      lemma34_pipeline(fx.p, fx.q, fx.u0, fx.u1, fx.m, fx.n, cfg);
  REQUIRE(res.report.pass);
  REQUIRE(res.report.corner_classes ==
          std::vector<long long>{1, 0, 0, 0});
  REQUIRE(res.report.bezout == std::array<long long, 2>{-1, 1});
  REQUIRE(res.report.conjugation_defect <= 1e-8);
  REQUIRE(res.element.has_value());
  const DdCheckResult check = dd_check(res.element->path, 2, 3, 1e-8);
  REQUIRE(check.ok);
  REQUIRE(res.element->path.front().distance(
              res.u0_corrected.tensor_identity(3)) <= 1e-10);
  REQUIRE(res.element->path.back().distance(
              res.u1_corrected.tensor_identity(2)) <= 1e-10);

  // Without the correction the obstruction is reported, not silently fixed.
  Lemma34Options opts;
  opts.disable_correction = true;
  const Lemma34Result control =
      lemma34_pipeline(fx.p, fx.q, fx.u0, fx.u1, fx.m, fx.n, cfg, opts);
  REQUIRE_FALSE(control.report.pass);
  REQUIRE_FALSE(control.element.has_value());
  REQUIRE(control.report.corner_classes[2] == 1);
}

TEST_CASE("lemma 3.4 fixture needs a circle for nonzero windings",
          "[ktheory]") {
  const RunConfig cfg = small_config();
  REQUIRE_THROWS_AS(
      lemma34_demo_fixture(BaseAlgebra::matrices(4), 2, 3, 1, cfg),
      ConfigError);
}

TEST_CASE("corollary 3.6 completes and contracts", "[ktheory][pipeline]") {
  const RunConfig cfg = small_config();
  const BaseAlgebra base = BaseAlgebra::circle_loops(4, cfg.grid_g);
  const Corollary36Fixture fx = corollary36_demo_fixture(base, 2, cfg);

  const Corollary36Parts parts = corollary36_build(fx.v, fx.w, cfg);
  REQUIRE(parts.class_vw == 2);
  REQUIRE(parts.class_completed == 0);
  REQUIRE(parts.completed.unitarity_defect() <= 1e-10);
  REQUIRE((fx.v.v + parts.v_perp).distance(parts.completed) == 0.0);

  const Corollary36Result res = corollary36_complement(fx.v, fx.w, cfg);
  REQUIRE(res.report.pass);
  REQUIRE(res.report.corner_classes == std::vector<long long>{2, 0});
  REQUIRE(res.path.front().distance(parts.completed) <= 1e-10);
  REQUIRE(res.path.back().distance(
              AlgebraElement::identity(base, fx.v.v.amp())) <= 1e-10);
}

TEST_CASE("corollary 3.6 requires full complements", "[ktheory]") {
  const RunConfig cfg = small_config();
  const BaseAlgebra base = BaseAlgebra::circle_loops(4, cfg.grid_g);
  const PartialIsometryElement full = PartialIsometryElement::make(
      AlgebraElement::identity(base, 1), cfg.tol);
  REQUIRE_THROWS_AS(
      corollary36_complement(full, AlgebraElement::zero(base, 1), cfg),
      NotFullError);
}

TEST_CASE("theorem 3.9 connects the amplified copies", "[ktheory][pipeline]") {
  const RunConfig cfg = small_config();
  const BaseAlgebra base = BaseAlgebra::matrices(4);
  const Theorem39Fixture fx = theorem39_demo_fixture(base, 2, 3, cfg);
  const Theorem39Result res =
      theorem39_intertwiner(fx.p, fx.q, fx.v0, fx.v1, fx.m, fx.n, cfg);
  REQUIRE(res.report.pass);
  REQUIRE(res.report.corner_classes == std::vector<long long>{0, 0});
  REQUIRE(res.path.front().distance(fx.v0.tensor_identity(3)) <= 1e-10);
  REQUIRE(res.path.back().distance(fx.v1.tensor_identity(2)) <= 1e-10);

  const AlgebraElement support = fx.p.tensor_identity(6);
  for (int t = 0; t <= res.path.resolution(); t += 8) {
    const AlgebraElement& vt = res.path.sample(t);
    REQUIRE((vt.adjoint() * vt).distance(support) <= 1e-8);
  }
}

TEST_CASE("theorem 3.9 fixture rejects oversized factors", "[ktheory]") {
  const RunConfig cfg = small_config();
  REQUIRE_THROWS_AS(
      theorem39_demo_fixture(BaseAlgebra::matrices(4), 4, 5, cfg),
      ConfigError);
}

}  // namespace
