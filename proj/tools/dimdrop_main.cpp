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
//
// Command-line front door: builds seeded fixtures, runs the certificate
// pipelines, and writes JSON or CSV reports.  Exit codes: 0 when the
// top-level verdict passes, 2 when a pipeline ran but failed its budgets,
// 3 on configuration or precondition errors.

#include <cstdlib>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimdrop/algebra.hpp"
#include "dimdrop/certificate.hpp"
#include "dimdrop/config.hpp"
#include "dimdrop/errors.hpp"
#include "dimdrop/families.hpp"
#include "dimdrop/homotopy.hpp"
#include "dimdrop/ktheory.hpp"
#include "dimdrop/rng.hpp"
#include "dimdrop/serialization.hpp"
#include "dimdrop/version.hpp"

namespace {

using json = nlohmann::json;

dimdrop::BaseAlgebra parse_base(const std::string& text, int grid_g) {
  if (text == "scalars") return dimdrop::BaseAlgebra::scalars();
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  int size = 1;
  if (colon != std::string::npos) {
    try {
      size = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw dimdrop::ConfigError("bad base fiber size in '" + text + "'");
    }
  }
  if (head == "matrices") return dimdrop::BaseAlgebra::matrices(size);
  if (head == "circle") return dimdrop::BaseAlgebra::circle_loops(size, grid_g);
  throw dimdrop::ConfigError("unknown base '" + text +
                             "' (scalars | matrices:N | circle:N)");
}

// Output target: --out wins, then $DIMDROP_OUT_DIR/<command>.<ext>, then
// stdout.
std::string resolve_out(const std::string& out_flag, const std::string& command,
                        const std::string& format) {
  if (!out_flag.empty()) return out_flag;
  const char* dir = std::getenv("DIMDROP_OUT_DIR");
  if (dir != nullptr && *dir != '\0') {
    return std::string(dir) + "/" + command +
           (format == "csv" ? ".csv" : ".json");
  }
  return {};
}

struct Emitter {
  const dimdrop::RunConfig& cfg;
  std::string out_flag;
  std::string format;

  int deliver(const std::string& command, json payload, bool pass,
              const std::vector<dimdrop::StageVerdict>& stages) const {
    std::string text;
    if (format == "csv") {
      text = dimdrop::stages_to_csv(stages);
    } else {
      payload["config"] = json::parse(dimdrop::config_to_json(cfg));
      payload["tool_version"] = dimdrop::kVersion;
      payload["pass"] = pass;
      text = payload.dump(2) + "\n";
    }
    const std::string target = resolve_out(out_flag, command, format);
    if (target.empty()) {
      std::cout << text;
    } else {
      dimdrop::write_text_file(target, text);
    }
    return pass ? 0 : 2;
  }
};

// Endpoint/invariant suite for the standard elementary map at a degree:
// W(u; 0) must reproduce u (x) 1_n bitwise and W(u; 1) must be close to
// u^n (+) 1_{n-1}; along the way unitarity, step jumps and (over circle
// bases) determinant windings are recorded.
int run_verify_elementary(const Emitter& emitter, int degree,
                          const std::string& base_text, int samples) {
  const dimdrop::RunConfig& cfg = emitter.cfg;
  if (degree < 1) throw dimdrop::ConfigError("--n must be >= 1");
  if (samples < 1) throw dimdrop::ConfigError("--samples must be >= 1");
  const dimdrop::BaseAlgebra base = parse_base(base_text, cfg.grid_g);
  const dimdrop::ElementaryMap map(
      dimdrop::PathSequence::standard(degree, cfg.grid_t));

  dimdrop::StageVerdict stage;
  stage.name = "endpoints";
  stage.slice_count = samples;
  stage.endpoint_defect_first = 0.0;
  stage.endpoint_defect_last = 0.0;
  stage.winding_checked = base.is_circle();

  dimdrop::SeededRng rng(cfg.seed);
  for (int s = 0; s < samples; ++s) {
    const dimdrop::AlgebraElement u = dimdrop::sample_unitary(base, 1, rng);
    std::vector<dimdrop::AlgebraElement> samples_t;
    samples_t.reserve(cfg.grid_t + 1);
    for (int t = 0; t <= cfg.grid_t; ++t) samples_t.push_back(map.eval(u, t));
    const dimdrop::GridPath path(std::move(samples_t));

    stage.max_unitarity_defect =
        std::max(stage.max_unitarity_defect, path.max_unitarity_defect());
    stage.max_step_jump_t =
        std::max(stage.max_step_jump_t, path.max_step_jump());
    stage.endpoint_defect_first = std::max(
        stage.endpoint_defect_first,
        path.front().distance(u.tensor_identity(degree)));
    stage.endpoint_defect_last = std::max(
        stage.endpoint_defect_last,
        path.back().distance(u.pow(degree).oplus_identity(degree - 1)));
    if (stage.winding_checked) {
      const long long expected =
          degree * dimdrop::det_winding(u.fibers());
      for (int t = 0; t <= cfg.grid_t; ++t) {
        if (dimdrop::det_winding(path.sample(t).fibers()) != expected) {
          stage.winding_constant = false;
        }
      }
      stage.winding_value = expected;
    }
  }
  stage.endpoints_ok = stage.endpoint_defect_first <= cfg.endpoint_tol &&
                       stage.endpoint_defect_last <= cfg.endpoint_tol;

  dimdrop::HomotopyCertificate certificate;
  certificate.name = "verify_elementary";
  certificate.params.n = degree;
  certificate.params.base = base;
  certificate.params.grid_t = cfg.grid_t;
  certificate.params.grid_g = base.circle_grid;
  certificate.params.seed = cfg.seed;
  certificate.stages = {stage};
  certificate.pass = dimdrop::stages_pass(certificate.stages, cfg);

  json payload;
  payload["certificate"] = json::parse(dimdrop::certificate_to_json(certificate));
  return emitter.deliver("verify-elementary", std::move(payload),
                         certificate.pass, certificate.stages);
}

// Dual evaluation of the composite gamma = W o (V (x) 1): the product
// formula must agree with direct composition, and the shear family must
// hold its t = 1 column fixed.
int run_verify_basic(const Emitter& emitter, int m, int n,
                     const std::string& base_text, int samples) {
  const dimdrop::RunConfig& cfg = emitter.cfg;
  if (m < 1 || n < 1) throw dimdrop::ConfigError("--m and --n must be >= 1");
  if (samples < 1) throw dimdrop::ConfigError("--samples must be >= 1");
  const dimdrop::BaseAlgebra base = parse_base(base_text, cfg.grid_g);
  const dimdrop::ElementaryMap v(
      dimdrop::PathSequence::standard(m, cfg.grid_t));
  const dimdrop::ElementaryMap w(
      dimdrop::PathSequence::standard(n, cfg.grid_t));
  const dimdrop::ElementaryMap composed = dimdrop::gamma_compose(v, w);

  dimdrop::SeededRng rng(cfg.seed);
  dimdrop::StageVerdict dual;
  dual.name = "dual";
  dual.slice_count = samples;
  dimdrop::AlgebraElement first_sample =
      dimdrop::AlgebraElement::identity(base, 1);
  for (int s = 0; s < samples; ++s) {
    const dimdrop::AlgebraElement u = dimdrop::sample_unitary(base, 1, rng);
    if (s == 0) first_sample = u;
    for (int t = 0; t <= cfg.grid_t; ++t) {
      dual.max_boundary_defect = std::max(
          dual.max_boundary_defect,
          composed.eval(u, t).distance(dimdrop::gamma_direct_eval(v, w, u, t)));
    }
  }
  dual.slices_valid = dual.max_boundary_defect <= cfg.tol;

  dimdrop::HomotopyCertificate shear =
      dimdrop::gamma_shear(v, w, first_sample, cfg);

  dimdrop::HomotopyCertificate certificate;
  certificate.name = "verify_basic";
  certificate.params = shear.params;
  certificate.params.seed = cfg.seed;
  certificate.stages.push_back(dual);
  for (dimdrop::StageVerdict& stage : shear.stages) {
    certificate.stages.push_back(std::move(stage));
  }
  certificate.pass = dimdrop::stages_pass(certificate.stages, cfg);

  json payload;
  payload["certificate"] = json::parse(dimdrop::certificate_to_json(certificate));
  return emitter.deliver("verify-basic", std::move(payload), certificate.pass,
                         certificate.stages);
}

int run_certify_diagram(const Emitter& emitter, int k, int m, int n,
                        const std::string& base_text, int samples) {
  const dimdrop::RunConfig& cfg = emitter.cfg;
  const dimdrop::BaseAlgebra base = parse_base(base_text, cfg.grid_g);
  const dimdrop::DiagramCertificate diagram =
      dimdrop::diagram_certificate(base, k, m, n, samples, cfg);

  json payload;
  payload["certificates"]["upper_left"] =
      json::parse(dimdrop::certificate_to_json(diagram.upper_left));
  payload["certificates"]["lower_right"] =
      json::parse(dimdrop::certificate_to_json(diagram.lower_right));
  std::vector<dimdrop::StageVerdict> stages = diagram.upper_left.stages;
  stages.insert(stages.end(), diagram.lower_right.stages.begin(),
                diagram.lower_right.stages.end());
  return emitter.deliver("certify-diagram", std::move(payload), diagram.pass,
                         stages);
}

int run_demo_lemma34(const Emitter& emitter, int m, int n, int rank, int d,
                     long long winding, const std::string& base_text) {
  const dimdrop::RunConfig& cfg = emitter.cfg;
  if (rank != 2 || d != 4) {
    throw dimdrop::ConfigError(
        "the seeded fixture supports --rank 2 --d 4 only");
  }
  const dimdrop::BaseAlgebra base = parse_base(base_text, cfg.grid_g);
  const dimdrop::Lemma34Fixture fixture =
      dimdrop::lemma34_demo_fixture(base, m, n, winding, cfg);
  const dimdrop::Lemma34Result main_run = dimdrop::lemma34_pipeline(
      fixture.p, fixture.q, fixture.u0, fixture.u1, m, n, cfg, {});
  dimdrop::Lemma34Options control_opts;
  control_opts.disable_correction = true;
  const dimdrop::Lemma34Result control = dimdrop::lemma34_pipeline(
      fixture.p, fixture.q, fixture.u0, fixture.u1, m, n, cfg, control_opts);

  // The control run must report the injected corner class; with a nonzero
  // injection it must refuse to produce a path.
  const auto& classes = control.report.corner_classes;
  const bool control_ok =
      winding == 0
          ? control.report.pass
          : (!control.report.pass && classes.size() == 4 &&
             classes[0] == winding && !control.element.has_value());
  const bool pass = main_run.report.pass && control_ok;

  json payload;
  payload["report"] = json::parse(dimdrop::report_to_json(main_run.report));
  payload["negative_control"] =
      json::parse(dimdrop::report_to_json(control.report));
  payload["negative_control_ok"] = control_ok;
  return emitter.deliver("demo-lemma34", std::move(payload), pass,
                         main_run.report.stages);
}

int run_demo_corollary36(const Emitter& emitter, long long winding,
                         const std::string& base_text) {
  const dimdrop::RunConfig& cfg = emitter.cfg;
  const dimdrop::BaseAlgebra base = parse_base(base_text, cfg.grid_g);
  const dimdrop::Corollary36Fixture fixture =
      dimdrop::corollary36_demo_fixture(base, winding, cfg);
  const dimdrop::Corollary36Result result =
      dimdrop::corollary36_complement(fixture.v, fixture.w, cfg);

  json payload;
  payload["report"] = json::parse(dimdrop::report_to_json(result.report));
  return emitter.deliver("demo-corollary36", std::move(payload),
                         result.report.pass, result.report.stages);
}

int run_demo_theorem39(const Emitter& emitter, int m, int n, int d,
                       const std::string& base_text) {
  const dimdrop::RunConfig& cfg = emitter.cfg;
  if (d != 4) {
    throw dimdrop::ConfigError("the seeded fixture supports --d 4 only");
  }
  const dimdrop::BaseAlgebra base = parse_base(base_text, cfg.grid_g);
  const dimdrop::Theorem39Fixture fixture =
      dimdrop::theorem39_demo_fixture(base, m, n, cfg);
  const dimdrop::Theorem39Result result = dimdrop::theorem39_intertwiner(
      fixture.p, fixture.q, fixture.v0, fixture.v1, m, n, cfg);

  json payload;
  payload["report"] = json::parse(dimdrop::report_to_json(result.report));
  return emitter.deliver("demo-theorem39", std::move(payload),
                         result.report.pass, result.report.stages);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimension drop homotopy laboratory"};
  app.require_subcommand(1);

  double tol = 0.0;
  int grid_t = 0;
  int grid_g = 0;
  int grid_s = 0;
  std::uint64_t seed = 0;
  std::string out_flag;
  std::string format = "json";
  std::string config_file;
  app.add_option("--tol", tol, "matrix predicate tolerance");
  app.add_option("--grid-t", grid_t, "time resolution T (even, >= 8)");
  app.add_option("--grid-g", grid_g, "circle resolution G (>= 8)");
  app.add_option("--grid-s", grid_s, "family slice budget (>= 4)");
  app.add_option("--seed", seed, "fixture RNG seed");
  app.add_option("--out", out_flag, "output file (default: stdout)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--config", config_file,
                 "JSON config file (flags override its values)");

  int ve_n = 2;
  int ve_samples = 10;
  std::string ve_base = "circle:1";
  CLI::App* verify_elementary = app.add_subcommand(
      "verify-elementary", "endpoint suite for the standard elementary map");
  verify_elementary->add_option("--n", ve_n, "degree of the elementary map");
  verify_elementary->add_option("--samples", ve_samples, "seeded unitaries");
  verify_elementary->add_option("--base", ve_base,
                                "scalars | matrices:N | circle:N");
  verify_elementary->fallthrough();

  int vb_m = 2;
  int vb_n = 3;
  int vb_samples = 5;
  std::string vb_base = "circle:1";
  CLI::App* verify_basic = app.add_subcommand(
      "verify-basic", "dual evaluation and shear of the composite map");
  verify_basic->add_option("--m", vb_m, "first degree");
  verify_basic->add_option("--n", vb_n, "second degree");
  verify_basic->add_option("--samples", vb_samples, "seeded unitaries");
  verify_basic->add_option("--base", vb_base,
                           "scalars | matrices:N | circle:N");
  verify_basic->fallthrough();

  int cd_k = 2;
  int cd_m = 2;
  int cd_n = 3;
  int cd_samples = 1;
  std::string cd_base = "circle:1";
  CLI::App* certify_diagram = app.add_subcommand(
      "certify-diagram", "amplification square commutes up to homotopy");
  certify_diagram->add_option("--k", cd_k, "amplification size");
  certify_diagram->add_option("--m", cd_m, "first degree");
  certify_diagram->add_option("--n", cd_n, "second degree");
  certify_diagram->add_option("--samples", cd_samples, "seeded unitaries");
  certify_diagram->add_option("--base", cd_base,
                              "scalars | matrices:N | circle:N");
  certify_diagram->fallthrough();

  int l34_m = 2;
  int l34_n = 3;
  int l34_rank = 2;
  int l34_d = 4;
  long long l34_winding = 1;
  std::string l34_base = "circle:4";
  CLI::App* demo_lemma34 = app.add_subcommand(
      "demo-lemma34", "intertwiner pipeline on a seeded fixture");
  demo_lemma34->add_option("--m", l34_m, "first multiplicity");
  demo_lemma34->add_option("--n", l34_n, "second multiplicity");
  demo_lemma34->add_option("--rank", l34_rank, "rank of p (fixture: 2)");
  demo_lemma34->add_option("--d", l34_d, "fiber size (fixture: 4)");
  demo_lemma34->add_option("--winding", l34_winding, "injected corner class");
  demo_lemma34->add_option("--base", l34_base,
                           "scalars | matrices:N | circle:N");
  demo_lemma34->fallthrough();

  long long c36_winding = 1;
  std::string c36_base = "circle:4";
  CLI::App* demo_corollary36 = app.add_subcommand(
      "demo-corollary36", "unitary completion of a partial isometry");
  demo_corollary36->add_option("--winding", c36_winding,
                               "injected winding of the isometry");
  demo_corollary36->add_option("--base", c36_base,
                               "scalars | matrices:N | circle:N");
  demo_corollary36->fallthrough();

  int t39_m = 2;
  int t39_n = 3;
  int t39_d = 4;
  std::string t39_base = "matrices:4";
  CLI::App* demo_theorem39 = app.add_subcommand(
      "demo-theorem39", "partial isometry intertwiner through the q corner");
  demo_theorem39->add_option("--m", t39_m, "first multiplicity");
  demo_theorem39->add_option("--n", t39_n, "second multiplicity");
  demo_theorem39->add_option("--d", t39_d, "fiber size (fixture: 4)");
  demo_theorem39->add_option("--base", t39_base,
                             "scalars | matrices:N | circle:N");
  demo_theorem39->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 3;
  }

  try {
    dimdrop::RunConfig cfg;
    if (!config_file.empty()) {
      cfg = dimdrop::config_from_json(dimdrop::read_text_file(config_file));
    }
    if (app.count("--tol") > 0) cfg.tol = tol;
    if (app.count("--grid-t") > 0) cfg.grid_t = grid_t;
    if (app.count("--grid-g") > 0) cfg.grid_g = grid_g;
    if (app.count("--grid-s") > 0) cfg.grid_s = grid_s;
    if (app.count("--seed") > 0) cfg.seed = seed;
    cfg.validate();

    const Emitter emitter{cfg, out_flag, format};
    if (verify_elementary->parsed()) {
      return run_verify_elementary(emitter, ve_n, ve_base, ve_samples);
    }
    if (verify_basic->parsed()) {
      return run_verify_basic(emitter, vb_m, vb_n, vb_base, vb_samples);
    }
    if (certify_diagram->parsed()) {
      return run_certify_diagram(emitter, cd_k, cd_m, cd_n, cd_base,
                                 cd_samples);
    }
    if (demo_lemma34->parsed()) {
      return run_demo_lemma34(emitter, l34_m, l34_n, l34_rank, l34_d,
                              l34_winding, l34_base);
    }
    if (demo_corollary36->parsed()) {
      return run_demo_corollary36(emitter, c36_winding, c36_base);
    }
    if (demo_theorem39->parsed()) {
      return run_demo_theorem39(emitter, t39_m, t39_n, t39_d, t39_base);
    }
    std::cerr << "error: no command selected\n";
    return 3;
  } catch (const dimdrop::Error& err) {
    std::cerr << "error [" << dimdrop::to_string(err.kind())
              << "]: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
