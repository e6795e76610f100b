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
// JSON / CSV interchange.  All JSON comes out with sorted keys, two-space
// indentation, shortest round-trip doubles and no timestamps, so a run with
// equal inputs produces byte-identical files.  The JSON library stays an
// implementation detail: the public surface trades in plain strings.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "dimdrop/algebra.hpp"
#include "dimdrop/certificate.hpp"
#include "dimdrop/config.hpp"

namespace dimdrop {

// Run configuration. Parsing starts from defaults and overrides the keys
// present; unknown keys are rejected (SerializationError) to catch typos.
std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

// Elements and paths. Fibers are stored row-major as [re, im] pairs.
std::string element_to_json(const AlgebraElement& x);
AlgebraElement element_from_json(const std::string& text);

std::string path_to_json(const GridPath& path);
GridPath path_from_json(const std::string& text);

// Named collections of elements (fixture inputs and outputs).
using ElementBundle = std::map<std::string, AlgebraElement>;
std::string bundle_to_json(const ElementBundle& bundle);
ElementBundle bundle_from_json(const std::string& text);

// Certificates and pipeline reports (output only).
std::string certificate_to_json(const HomotopyCertificate& certificate);
std::string report_to_json(const PipelineReport& report);

// One CSV row per stage with a fixed column order.
std::string stages_to_csv(const std::vector<StageVerdict>& stages);

// Whole-file helpers (throw SerializationError on I/O failure).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dimdrop
