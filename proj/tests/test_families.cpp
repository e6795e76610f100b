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
#include <cmath>
#include <numbers>
#include <vector>

#include "dimdrop/errors.hpp"
#include "dimdrop/families.hpp"
#include "dimdrop/ktheory.hpp"

using namespace dimdrop;

namespace {

constexpr double kPi = std::numbers::pi;

RunConfig small_config() {
  RunConfig cfg;
  cfg.grid_t = 32;
  cfg.grid_g = 16;
  cfg.grid_s = 9;
  cfg.validate();
  return cfg;
}

TEST_CASE("seeded unitaries are reproducible and smooth", "[families]") {
  const BaseAlgebra base = BaseAlgebra::circle_loops(2, 16);
  SeededRng rng_a(42);
  SeededRng rng_b(42);
  const AlgebraElement ua = sample_unitary(base, 2, rng_a);
  const AlgebraElement ub = sample_unitary(base, 2, rng_b);
  REQUIRE(ua.same_bits(ub));
  REQUIRE(ua.unitarity_defect() < 1e-12);
  REQUIRE(ua.max_fiber_jump() < 1.0);

  SeededRng rng_c(43);
  REQUIRE_FALSE(ua.same_bits(sample_unitary(base, 2, rng_c)));
}

TEST_CASE("winding loops carry their label", "[families]") {
  const BaseAlgebra base = BaseAlgebra::circle_loops(2, 16);
  for (long long c : {-2LL, 0LL, 3LL}) {
    const AlgebraElement loop = winding_loop(base, 1, c);
    REQUIRE(loop.unitarity_defect() <= 1e-14);
    REQUIRE(det_winding(loop) == c);
  }
}

TEST_CASE("shrink family certifies the elementary contraction",
          "[families]") {
  const RunConfig cfg = small_config();
  SeededRng rng(cfg.seed);
  // The circle grid stays well above what the degree-3 determinant winding
  // of a seeded loop needs for unambiguous phase steps.
  const BaseAlgebra base = BaseAlgebra::circle_loops(1, 64);
  const AlgebraElement u = sample_unitary(base, 1, rng);
  const ElementaryMap e(PathSequence::standard(3, cfg.grid_t));
  const HomotopyCertificate cert = shrink_family(e, u, cfg);
  REQUIRE(cert.pass);
  REQUIRE_FALSE(cert.stages.empty());
  for (const StageVerdict& stage : cert.stages) {
    REQUIRE(stage.slices_valid);
    REQUIRE(stage.winding_checked);
    REQUIRE(stage.winding_constant);
  }
}

TEST_CASE("gamma shear pins the far edge", "[families]") {
  const RunConfig cfg = small_config();
  SeededRng rng(1);
  const AlgebraElement u = sample_unitary(BaseAlgebra::scalars(), 1, rng);
  const ElementaryMap v(PathSequence::standard(2, cfg.grid_t));
  const ElementaryMap w(PathSequence::standard(3, cfg.grid_t));
  const HomotopyCertificate cert = gamma_shear(v, w, u, cfg);
  REQUIRE(cert.pass);
  for (const StageVerdict& stage : cert.stages) {
    REQUIRE(stage.slices_valid);
    REQUIRE(stage.endpoints_ok);
  }
}

TEST_CASE("relative-endpoint homotopy fixes both ends", "[families]") {
  const int T = 16;
  std::vector<CMat> p;
  std::vector<CMat> q;
  for (int t = 0; t <= T; ++t) {
    const double tau = static_cast<double>(t) / T;
    CMat d = CMat::Zero(2, 2);
    d(0, 0) = std::exp(cplx(0.0, kPi * tau / 4.0));
    d(1, 1) = std::exp(cplx(0.0, -kPi * tau / 4.0));
    p.push_back(d);
    const double ang = 0.3 * std::sin(kPi * tau);
    CMat r(2, 2);
    r << cplx(std::cos(ang), 0.0), cplx(-std::sin(ang), 0.0),
        cplx(std::sin(ang), 0.0), cplx(std::cos(ang), 0.0);
    q.push_back(r * d * r.adjoint());
  }
  const RelEndpointFamily family = rel_endpoint_homotopy(p, q, 1e-8);
  REQUIRE(family.resolution() == T);

  const std::vector<CMat> at0 = family.slice(0.0);
  for (int t = 0; t <= T; ++t) {
    REQUIRE(operator_norm(at0[t] - p[t]) == 0.0);
  }
  const std::vector<CMat> at1 = family.slice(1.0);
  for (int t = 0; t <= T; ++t) {
    REQUIRE(operator_norm(at1[t] - q[t]) < 1e-11);
  }
  // Interior slices keep the common endpoints.
  const std::vector<CMat> mid = family.slice(0.5);
  REQUIRE(operator_norm(mid.front() - p.front()) < 1e-12);
  REQUIRE(operator_norm(mid.back() - p.back()) < 1e-12);

  // Mismatched endpoints are rejected.
  std::vector<CMat> q_bad = q;
  q_bad.back() = identity(2);
  REQUIRE_THROWS_AS(rel_endpoint_homotopy(p, q_bad, 1e-8), PreconditionError);
}

TEST_CASE("elementary homotopy reaches a conjugated sequence", "[families]") {
  RunConfig cfg = small_config();
  const PathSequence seq = PathSequence::standard(2, cfg.grid_t);
  CMat c = CMat::Zero(2, 2);
  c(0, 0) = std::exp(cplx(0.0, 0.4));
  c(1, 1) = std::exp(cplx(0.0, -0.4));
  const PathSequence conj = seq.conjugated(c);
  const ElementaryMap e(seq);
  const ElementaryMap f(conj);
  const ElementaryFamily family = elementary_homotopy(e, f, 8, cfg);
  REQUIRE(family.certificate.pass);
  REQUIRE(family.slices.size() == 9);

  // First slice is E's sequence bitwise; the last reproduces F closely.
  for (int j = 1; j <= 2; ++j) {
    for (int t = 0; t <= cfg.grid_t; ++t) {
      REQUIRE(operator_norm(family.slices.front().at(j, t) - seq.at(j, t)) ==
              0.0);
      REQUIRE(operator_norm(family.slices.back().at(j, t) - conj.at(j, t)) <
              1e-8);
    }
  }
  // Every slice is a valid sequence: identities at t = 0, H_{n,j} at t = 1.
  for (const PathSequence& slice : family.slices) {
    REQUIRE(slice.validate().worst() < 1e-7);
  }
}

TEST_CASE("eta is homotopic to the unitization embedding", "[families]") {
  const RunConfig cfg = small_config();
  SeededRng rng(cfg.seed);
  const BasicMapSpec spec = BasicMapSpec::standard(1, 2, 3, cfg.grid_t);
  const AlgebraElement u = sample_unitary(BaseAlgebra::scalars(), 1, rng);
  const HomotopyCertificate cert = eta_iota_certificate(spec, u, cfg);
  REQUIRE(cert.pass);
  REQUIRE(cert.stages.size() >= 3);
  for (const StageVerdict& stage : cert.stages) {
    REQUIRE(stage.slices_valid);
    REQUIRE(stage.endpoints_ok);
  }
}

TEST_CASE("flip untwist carries the swap to the identity", "[families]") {
  const FlipUntwist flip = flip_untwist(2, 16);
  REQUIRE(flip.path.size() == 17);
  REQUIRE(operator_norm(flip.path.front() - flip.swap) == 0.0);
  REQUIRE(operator_norm(flip.path.back() - identity(4)) == 0.0);
  for (const CMat& sample : flip.path) {
    REQUIRE(operator_norm(CMat(sample.adjoint() * sample) - identity(4)) <
            1e-12);
  }

  SeededRng rng(8);
  const AlgebraElement v = sample_unitary(BaseAlgebra::scalars(), 2, rng);
  const AlgebraElement last =
      flip.psi(v, static_cast<int>(flip.path.size()) - 1);
  REQUIRE(last.distance(mu_k(v, 2)) == 0.0);
  REQUIRE(flip.psi(v, 0).unitarity_defect() < 1e-12);
}

TEST_CASE("exchange_legs is the exact outer permutation", "[families]") {
  CMat x(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      x(i, j) = cplx(static_cast<double>(4 * i + j), 0.0);
    }
  }
  const CMat y = exchange_legs(x, 2, 2, 1);
  // Rows/cols reindex (alpha, beta) -> (beta, alpha).
  REQUIRE(y(1, 0) == x(2, 0));
  REQUIRE(y(2, 3) == x(1, 3));
  REQUIRE(y(0, 0) == x(0, 0));
  REQUIRE(y(3, 3) == x(3, 3));
  // Doing it twice is the identity.
  const CMat z = exchange_legs(y, 2, 2, 1);
  REQUIRE(operator_norm(z - x) == 0.0);
}

TEST_CASE("amplification diagram certifies over scalars", "[families]") {
  const RunConfig cfg = small_config();
  const DiagramCertificate cert =
      diagram_certificate(BaseAlgebra::scalars(), 2, 2, 3, 1, cfg);
  REQUIRE(cert.pass);
  REQUIRE(cert.upper_left.pass);
  REQUIRE(cert.lower_right.pass);
  REQUIRE_FALSE(cert.upper_left.stages.empty());
  REQUIRE_FALSE(cert.lower_right.stages.empty());
}

}  // namespace
