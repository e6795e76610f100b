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
#include <filesystem>
#include <string>

#include "dimdrop/errors.hpp"
#include "dimdrop/families.hpp"
#include "dimdrop/serialization.hpp"

using namespace dimdrop;

namespace {

TEST_CASE("config json roundtrip and typo rejection", "[serialization]") {
  RunConfig cfg;
  cfg.tol = 1e-7;
  cfg.grid_t = 64;
  cfg.grid_s = 12;
  cfg.seed = 99;

  const std::string text = config_to_json(cfg);
  REQUIRE(text == config_to_json(cfg));  // deterministic bytes
  REQUIRE(text.back() == '\n');

  const RunConfig back = config_from_json(text);
  REQUIRE(back.tol == cfg.tol);
  REQUIRE(back.grid_t == cfg.grid_t);
  REQUIRE(back.grid_s == cfg.grid_s);
  REQUIRE(back.seed == cfg.seed);
  REQUIRE(back.lipschitz_t == cfg.lipschitz_t);

  // Partial documents keep the defaults for absent keys.
  const RunConfig sparse = config_from_json("{\"grid_g\": 48}");
  REQUIRE(sparse.grid_g == 48);
  REQUIRE(sparse.tol == RunConfig{}.tol);

  REQUIRE_THROWS_AS(config_from_json("{\"grid_tt\": 16}"),
                    SerializationError);
  REQUIRE_THROWS_AS(config_from_json("not json"), SerializationError);
}

TEST_CASE("element json roundtrip is bitwise", "[serialization]") {
  SeededRng rng(77);
  const BaseAlgebra base = BaseAlgebra::circle_loops(2, 8);
  const AlgebraElement u = sample_unitary(base, 2, rng);
  const std::string text = element_to_json(u);
  const AlgebraElement back = element_from_json(text);
  REQUIRE(back.base() == base);
  REQUIRE(back.amp() == 2);
  REQUIRE(back.same_bits(u));
  REQUIRE_THROWS_AS(element_from_json("[]"), SerializationError);
}

TEST_CASE("path json roundtrip is bitwise", "[serialization]") {
  SeededRng rng(78);
  const AlgebraElement u =
      sample_unitary(BaseAlgebra::circle_loops(1, 8), 1, rng);
  const GridPath path = iota_embed(u, 2, 3, 4).path;
  const GridPath back = path_from_json(path_to_json(path));
  REQUIRE(back.resolution() == path.resolution());
  for (int t = 0; t <= path.resolution(); ++t) {
    REQUIRE(back.sample(t).same_bits(path.sample(t)));
  }
}

TEST_CASE("bundle json keeps names and bits", "[serialization]") {
  SeededRng rng(79);
  const BaseAlgebra base = BaseAlgebra::matrices(3);
  ElementBundle bundle;
  bundle["u"] = sample_unitary(base, 1, rng);
  bundle["one"] = AlgebraElement::identity(base, 2);
  const ElementBundle back = bundle_from_json(bundle_to_json(bundle));
  REQUIRE(back.size() == 2);
  REQUIRE(back.at("u").same_bits(bundle.at("u")));
  REQUIRE(back.at("one").same_bits(bundle.at("one")));
}

TEST_CASE("certificate json is deterministic and complete",
          "[serialization]") {
  RunConfig cfg;
  cfg.grid_t = 16;
  // A generous circle grid keeps the seeded winding well below the phase
  // unwrapping limit for the degree-2 slices below.
  cfg.grid_g = 64;
  cfg.grid_s = 8;
  cfg.validate();
  SeededRng rng(cfg.seed);
  const AlgebraElement u =
      sample_unitary(BaseAlgebra::circle_loops(1, cfg.grid_g), 1, rng);
  const ElementaryMap e(PathSequence::standard(2, cfg.grid_t));
  const HomotopyCertificate cert = shrink_family(e, u, cfg);

  const std::string text = certificate_to_json(cert);
  REQUIRE(text == certificate_to_json(cert));
  REQUIRE(text.back() == '\n');
  for (const char* key :
       {"\"name\"", "\"params\"", "\"stages\"", "\"pass\"", "\"winding\""}) {
    INFO(key);
    REQUIRE(text.find(key) != std::string::npos);
  }
}

TEST_CASE("report json carries the class bookkeeping", "[serialization]") {
  PipelineReport report;
  report.name = "demo";
  report.corner_classes = {1, 0, 0, 0};
  report.bezout = {-1, 1};
  report.conjugation_defect = 0.5;
  report.pass = true;
  StageVerdict stage;
  stage.name = "contract";
  stage.slice_count = 2;
  report.stages.push_back(stage);

  const std::string text = report_to_json(report);
  for (const char* key : {"\"corner_classes\"", "\"bezout\"",
                          "\"conjugation_defect\"", "\"stages\""}) {
    INFO(key);
    REQUIRE(text.find(key) != std::string::npos);
  }
}

TEST_CASE("stage csv has a frozen layout", "[serialization]") {
  StageVerdict stage;
  stage.name = "demo";
  stage.slice_count = 3;
  stage.max_unitarity_defect = 0.5;
  stage.max_boundary_defect = 0.0;
  stage.max_step_jump_s = 0.25;
  stage.max_step_jump_t = 2.0;
  stage.endpoint_defect_first = -1.0;
  stage.endpoint_defect_last = 0.125;
  stage.endpoints_ok = true;
  stage.slices_valid = false;
  stage.winding_checked = true;
  stage.winding_constant = false;
  stage.winding_value = -7;

  const std::string expected =
      "name,slice_count,max_unitarity_defect,max_boundary_defect,"
      "max_step_jump_s,max_step_jump_t,endpoint_defect_first,"
      "endpoint_defect_last,endpoints_ok,slices_valid,winding_checked,"
      "winding_constant,winding_value\n"
      "demo,3,0.5,0,0.25,2,-1,0.125,1,0,1,0,-7\n";
  REQUIRE(stages_to_csv({stage}) == expected);
}

TEST_CASE("text file helpers roundtrip and fail loudly", "[serialization]") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "dimdrop_serialization_test")
          .string();
  const std::string content = "line one\nline two\n";
  write_text_file(path, content);
  REQUIRE(read_text_file(path) == content);
  std::filesystem::remove(path);
  REQUIRE_THROWS_AS(read_text_file(path), SerializationError);
}

}  // namespace
