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

#include "dimdrop/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "dimdrop/errors.hpp"

namespace dimdrop {

namespace {

using json = nlohmann::json;  // std::map keys, hence sorted output

json base_to_node(const BaseAlgebra& base) {
  return json{{"kind", to_string(base.kind)},
              {"fiber_size", base.fiber_size},
              {"circle_grid", base.circle_grid}};
}

BaseAlgebra base_from_node(const json& node) {
  const std::string kind = node.at("kind").get<std::string>();
  const int fiber_size = node.at("fiber_size").get<int>();
  if (kind == "scalars") return BaseAlgebra::scalars();
  if (kind == "matrices") return BaseAlgebra::matrices(fiber_size);
  if (kind == "circle") {
    return BaseAlgebra::circle_loops(fiber_size,
                                     node.at("circle_grid").get<int>());
  }
  throw SerializationError("unknown base kind '" + kind + "'");
}

json element_to_node(const AlgebraElement& x) {
  json fibers = json::array();
  const Eigen::Index dim = x.dim();
  for (int g = 0; g < x.fiber_count(); ++g) {
    json entries = json::array();
    const CMat& fiber = x.fiber(g);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        entries.push_back(json::array(
            {fiber(i, j).real(), fiber(i, j).imag()}));
      }
    }
    fibers.push_back(std::move(entries));
  }
  return json{{"base", base_to_node(x.base())},
              {"amp", x.amp()},
              {"fibers", std::move(fibers)}};
}

AlgebraElement element_from_node(const json& node) {
  const BaseAlgebra base = base_from_node(node.at("base"));
  const int amp = node.at("amp").get<int>();
  const Eigen::Index dim = base.dim(amp);
  const json& fibers = node.at("fibers");
  if (!fibers.is_array() ||
      static_cast<int>(fibers.size()) != base.sample_count()) {
    throw SerializationError("element fiber count mismatch");
  }
  std::vector<CMat> mats;
  mats.reserve(fibers.size());
  for (const json& entries : fibers) {
    if (static_cast<Eigen::Index>(entries.size()) != dim * dim) {
      throw SerializationError("element fiber entry count mismatch");
    }
    CMat fiber(dim, dim);
    Eigen::Index flat = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j, ++flat) {
        const json& pair = entries.at(flat);
        fiber(i, j) = cplx(pair.at(0).get<double>(),
                           pair.at(1).get<double>());
      }
    }
    mats.push_back(std::move(fiber));
  }
  return AlgebraElement(base, amp, std::move(mats));
}

json params_to_node(const CertParams& params) {
  return json{{"base", base_to_node(params.base)},
              {"k", params.k},
              {"m", params.m},
              {"n", params.n},
              {"grid_t", params.grid_t},
              {"grid_g", params.grid_g},
              {"grid_s", params.grid_s},
              {"seed", params.seed}};
}

json stage_to_node(const StageVerdict& stage) {
  json node{{"name", stage.name},
            {"slice_count", stage.slice_count},
            {"max_unitarity_defect", stage.max_unitarity_defect},
            {"max_boundary_defect", stage.max_boundary_defect},
            {"max_step_jump_s", stage.max_step_jump_s},
            {"max_step_jump_t", stage.max_step_jump_t},
            {"endpoints_ok", stage.endpoints_ok},
            {"slices_valid", stage.slices_valid}};
  if (stage.endpoint_defect_first >= 0.0 ||
      stage.endpoint_defect_last >= 0.0) {
    node["endpoint_defects"] = json::array(
        {stage.endpoint_defect_first, stage.endpoint_defect_last});
  }
  if (stage.winding_checked) {
    node["winding"] = json{{"value", stage.winding_value},
                           {"constant", stage.winding_constant}};
  }
  return node;
}

json stages_to_node(const std::vector<StageVerdict>& stages) {
  json out = json::array();
  for (const StageVerdict& stage : stages) out.push_back(stage_to_node(stage));
  return out;
}

std::string dump_sorted(const json& node) { return node.dump(2) + "\n"; }

template <typename Fn>
auto guard_parse(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& err) {
    throw SerializationError(err.what());
  }
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
  const json node{{"tol", cfg.tol},
                  {"boundary_tol", cfg.boundary_tol},
                  {"glue_tol", cfg.glue_tol},
                  {"branch_margin", cfg.branch_margin},
                  {"family_tol", cfg.family_tol},
                  {"endpoint_tol", cfg.endpoint_tol},
                  {"lipschitz_t", cfg.lipschitz_t},
                  {"lipschitz_s", cfg.lipschitz_s},
                  {"grid_t", cfg.grid_t},
                  {"grid_g", cfg.grid_g},
                  {"grid_s", cfg.grid_s},
                  {"seed", cfg.seed}};
  return dump_sorted(node);
}

RunConfig config_from_json(const std::string& text) {
  return guard_parse([&] {
    const json node = json::parse(text);
    RunConfig cfg;
    for (const auto& [key, value] : node.items()) {
      if (key == "tol") {
        cfg.tol = value.get<double>();
      } else if (key == "boundary_tol") {
        cfg.boundary_tol = value.get<double>();
      } else if (key == "glue_tol") {
        cfg.glue_tol = value.get<double>();
      } else if (key == "branch_margin") {
        cfg.branch_margin = value.get<double>();
      } else if (key == "family_tol") {
        cfg.family_tol = value.get<double>();
      } else if (key == "endpoint_tol") {
        cfg.endpoint_tol = value.get<double>();
      } else if (key == "lipschitz_t") {
        cfg.lipschitz_t = value.get<double>();
      } else if (key == "lipschitz_s") {
        cfg.lipschitz_s = value.get<double>();
      } else if (key == "grid_t") {
        cfg.grid_t = value.get<int>();
      } else if (key == "grid_g") {
        cfg.grid_g = value.get<int>();
      } else if (key == "grid_s") {
        cfg.grid_s = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else {
        throw SerializationError("unknown config key '" + key + "'");
      }
    }
    cfg.validate();
    return cfg;
  });
}

std::string element_to_json(const AlgebraElement& x) {
  return dump_sorted(element_to_node(x));
}

AlgebraElement element_from_json(const std::string& text) {
  return guard_parse([&] { return element_from_node(json::parse(text)); });
}

std::string path_to_json(const GridPath& path) {
  json samples = json::array();
  for (int t = 0; t < path.sample_count(); ++t) {
    samples.push_back(element_to_node(path.sample(t)));
  }
  return dump_sorted(json{{"samples", std::move(samples)}});
}

GridPath path_from_json(const std::string& text) {
  return guard_parse([&] {
    const json node = json::parse(text);
    std::vector<AlgebraElement> samples;
    for (const json& sample : node.at("samples")) {
      samples.push_back(element_from_node(sample));
    }
    return GridPath(std::move(samples));
  });
}

std::string bundle_to_json(const ElementBundle& bundle) {
  json node = json::object();
  for (const auto& [name, element] : bundle) {
    node[name] = element_to_node(element);
  }
  return dump_sorted(node);
}

ElementBundle bundle_from_json(const std::string& text) {
  return guard_parse([&] {
    const json node = json::parse(text);
    ElementBundle bundle;
    for (const auto& [name, value] : node.items()) {
      bundle.emplace(name, element_from_node(value));
    }
    return bundle;
  });
}

std::string certificate_to_json(const HomotopyCertificate& certificate) {
  const json node{{"name", certificate.name},
                  {"params", params_to_node(certificate.params)},
                  {"stages", stages_to_node(certificate.stages)},
                  {"pass", certificate.pass}};
  return dump_sorted(node);
}

std::string report_to_json(const PipelineReport& report) {
  const json node{{"name", report.name},
                  {"params", params_to_node(report.params)},
                  {"stages", stages_to_node(report.stages)},
                  {"corner_classes", report.corner_classes},
                  {"bezout", report.bezout},
                  {"conjugation_defect", report.conjugation_defect},
                  {"pass", report.pass}};
  return dump_sorted(node);
}

std::string stages_to_csv(const std::vector<StageVerdict>& stages) {
  std::ostringstream out;
  out << "name,slice_count,max_unitarity_defect,max_boundary_defect,"
         "max_step_jump_s,max_step_jump_t,endpoint_defect_first,"
         "endpoint_defect_last,endpoints_ok,slices_valid,winding_checked,"
         "winding_constant,winding_value\n";
  for (const StageVerdict& stage : stages) {
    out << stage.name << ',' << stage.slice_count << ','
        << format_double(stage.max_unitarity_defect) << ','
        << format_double(stage.max_boundary_defect) << ','
        << format_double(stage.max_step_jump_s) << ','
        << format_double(stage.max_step_jump_t) << ','
        << format_double(stage.endpoint_defect_first) << ','
        << format_double(stage.endpoint_defect_last) << ','
        << (stage.endpoints_ok ? 1 : 0) << ','
        << (stage.slices_valid ? 1 : 0) << ','
        << (stage.winding_checked ? 1 : 0) << ','
        << (stage.winding_constant ? 1 : 0) << ','
        << stage.winding_value << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SerializationError("cannot open '" + path + "' for write");
  out << content;
  if (!out) throw SerializationError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SerializationError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace dimdrop
