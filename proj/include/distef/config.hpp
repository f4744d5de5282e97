// Copyright 2026 The distef Authors. All Rights Reserved.
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
// =============================================================================

#ifndef DISTEF_CONFIG_HPP_
#define DISTEF_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "distef/compressor.hpp"
#include "distef/problem.hpp"
#include "distef/schedule.hpp"

namespace distef {

enum class OptimizerKind {
  kDistEf,         // two-way compressed distributed SGD with error feedback
  kEfSgd,          // single-machine error-feedback SGD
  kFullPrecision,  // distributed SGD / SGDM
  kSignSgd,        // majority vote, sign of gradient
  kSignum,         // majority vote, sign of momentum
};

const char* to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t workers = 1;     // M
  std::size_t iterations = 1;  // T
  std::size_t batch_size = 1;
  OptimizerKind optimizer = OptimizerKind::kDistEf;
  double momentum = 0.0;      // mu in [0, 1)
  double weight_decay = 0.0;  // lambda >= 0
  double x0_scale = 1.0;
  bool wire_mode = false;  // route deltas through the wire codec
  bool verify = false;     // retain trace and run recurrence checks
  bool fault_inject = false;  // test hook: corrupt worker-0 error bookkeeping
  CompressorSpec compressor;
  ScheduleSpec schedule;
  ProblemSpec problem;
  std::size_t dim = 0;  // resolved from the problem at load time
};

void validate(const RunConfig& config);

// Parses a config JSON document, resolving the problem dimension, the
// compressor partition ("whole" | "equal" | "natural" | "sizes") and the
// schedule's (T, M, delta) fields. Throws ConfigError on any invalid field.
RunConfig parse_run_config(const nlohmann::json& doc);

nlohmann::json run_config_to_json(const RunConfig& config);

// Applies a dotted-path override such as "schedule.gamma=0.1" or
// "optimizer=signsgd". The value is parsed as JSON when possible and as a
// bare string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Sets doc at a dotted path ("compressor.kind"), creating objects as needed.
void set_json_path(nlohmann::json& doc, const std::string& path,
                   nlohmann::json value);

nlohmann::json load_json_file(const std::string& path);

}  // namespace distef

#endif  // DISTEF_CONFIG_HPP_
