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

#ifndef DISTEF_CLI_HPP_
#define DISTEF_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace distef::cli {

// Stable exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeFailure = 1;  // divergence / failed invariant
inline constexpr int kExitUsage = 2;           // bad arguments or config

// Environment variable naming the default output root (fallback "runs").
inline constexpr const char* kOutputRootEnv = "DISTEF_OUT";

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides, std::ostream& out,
            std::ostream& err);
int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& overrides, std::ostream& out,
              std::ostream& err);
int cmd_verify(bool fault_inject, std::ostream& out);
int cmd_report(const std::vector<std::string>& run_dirs,
               const std::string& out_dir, std::ostream& out,
               std::ostream& err);

}  // namespace distef::cli

#endif  // DISTEF_CLI_HPP_
