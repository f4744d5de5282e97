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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "distef/cli.hpp"
#include "distef/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string write_config(const fs::path& dir, const json& doc,
                         const std::string& name = "config.json") {
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << doc.dump(2);
  return path.string();
}

json small_run_config() {
  return json::parse(R"({
    "seed": 9,
    "workers": 2,
    "iterations": 40,
    "batch_size": 1,
    "optimizer": "dist_ef",
    "momentum": 0.0,
    "verify": true,
    "compressor": {"kind": "blockwise_scaled_sign",
                   "partition": {"mode": "equal", "blocks": 4}},
    "schedule": {"kind": "constant", "gamma": 0.01},
    "problem": {"kind": "quadratic", "dim": 16,
                "condition_number": 4.0, "sigma": 0.5, "seed": 3}
  })");
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli_quiet(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return distef::cli::run_cli(args, out, err);
}

}  // namespace

TEST_CASE("run writes metrics and summary with exit 0") {
  TempDir tmp("distef_cli_run");
  const std::string config = write_config(tmp.path, small_run_config());
  const std::string out_dir = (tmp.path / "out").string();
  std::ostringstream out, err;
  const int code = distef::cli::run_cli({"run", "--config", config, "--out", out_dir},
                                        out, err);
  CHECK(code == distef::cli::kExitOk);
  std::ifstream csv(fs::path(out_dir) / "metrics.csv");
  REQUIRE(csv.good());
  const auto rows = distef::read_metrics_csv(csv);
  CHECK(rows.size() == 40);
  std::ifstream summary_file(fs::path(out_dir) / "summary.json");
  REQUIRE(summary_file.good());
  const json summary = json::parse(summary_file);
  CHECK(summary["config"]["seed"] == 9);
  CHECK(summary["verification"]["recurrence_ok"].get<bool>());
}

TEST_CASE("invalid momentum is a usage error") {
  TempDir tmp("distef_cli_bad");
  json doc = small_run_config();
  doc["momentum"] = 1.0;
  const std::string config = write_config(tmp.path, doc);
  CHECK(run_cli_quiet({"run", "--config", config,
                       "--out", (tmp.path / "out").string()}) ==
        distef::cli::kExitUsage);
}

TEST_CASE("missing config file is a usage error") {
  CHECK(run_cli_quiet({"run", "--config", "/no/such/file.json"}) ==
        distef::cli::kExitUsage);
  CHECK(run_cli_quiet({"run"}) == distef::cli::kExitUsage);
  CHECK(run_cli_quiet({"unknown-subcommand"}) == distef::cli::kExitUsage);
}

TEST_CASE("overrides switch the optimizer from the command line") {
  TempDir tmp("distef_cli_override");
  json doc = small_run_config();
  doc["momentum"] = 0.9;
  doc["verify"] = false;
  doc["schedule"]["gamma"] = 0.001;
  const std::string config = write_config(tmp.path, doc);
  const std::string out_dir = (tmp.path / "out").string();
  std::ostringstream out, err;
  const int code = distef::cli::run_cli(
      {"run", "--config", config, "--out", out_dir, "--set",
       "optimizer=signsgd"},
      out, err);
  CHECK(code == distef::cli::kExitOk);
  const json summary =
      json::parse(file_bytes(fs::path(out_dir) / "summary.json"));
  CHECK(summary["config"]["optimizer"] == "sign_sgd");
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir tmp("distef_cli_repro");
  const std::string config = write_config(tmp.path, small_run_config());
  const std::string dir_a = (tmp.path / "a").string();
  const std::string dir_b = (tmp.path / "b").string();
  REQUIRE(run_cli_quiet({"run", "--config", config, "--out", dir_a}) == 0);
  REQUIRE(run_cli_quiet({"run", "--config", config, "--out", dir_b}) == 0);
  CHECK(file_bytes(fs::path(dir_a) / "metrics.csv") ==
        file_bytes(fs::path(dir_b) / "metrics.csv"));
}

TEST_CASE("fault injection makes verification fail with exit 1") {
  TempDir tmp("distef_cli_fault");
  json doc = small_run_config();
  doc["fault_inject"] = true;
  const std::string config = write_config(tmp.path, doc);
  CHECK(run_cli_quiet({"run", "--config", config,
                       "--out", (tmp.path / "out").string()}) ==
        distef::cli::kExitRuntimeFailure);
}

TEST_CASE("sweep expands the grid with paired seeds") {
  TempDir tmp("distef_cli_sweep");
  json doc;
  doc["base"] = small_run_config();
  doc["base"]["verify"] = false;
  doc["grid"]["workers"] = {1, 2, 4};
  doc["repetitions"] = 3;
  const std::string config = write_config(tmp.path, doc, "sweep.json");
  const std::string out_dir = (tmp.path / "sweep_out").string();
  std::ostringstream out, err;
  const int code =
      distef::cli::run_cli({"sweep", "--config", config, "--out", out_dir},
                           out, err);
  CHECK(code == distef::cli::kExitOk);

  const json index =
      json::parse(file_bytes(fs::path(out_dir) / "index.json"));
  REQUIRE(index["runs"].size() == 9);
  CHECK(index["cells"] == 3);
  std::size_t csv_count = 0;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (entry.path().filename() == "metrics.csv") ++csv_count;
  }
  CHECK(csv_count == 9);
  // Repetition r shares its seed across every cell.
  std::map<std::size_t, std::set<std::uint64_t>> seeds_by_rep;
  for (const auto& entry : index["runs"]) {
    seeds_by_rep[entry["repetition"].get<std::size_t>()].insert(
        entry["seed"].get<std::uint64_t>());
    CHECK(entry["status"] == "ok");
  }
  for (const auto& [rep, seeds] : seeds_by_rep) CHECK(seeds.size() == 1);
}

TEST_CASE("empty sweep grid is a usage error") {
  TempDir tmp("distef_cli_sweep_empty");
  json doc;
  doc["base"] = small_run_config();
  doc["grid"] = json::object();
  const std::string config = write_config(tmp.path, doc, "sweep.json");
  CHECK(run_cli_quiet({"sweep", "--config", config,
                       "--out", (tmp.path / "x").string()}) ==
        distef::cli::kExitUsage);
}

TEST_CASE("sweep records failing cells and continues") {
  TempDir tmp("distef_cli_sweep_fail");
  json doc;
  doc["base"] = small_run_config();
  doc["base"]["verify"] = false;
  doc["grid"]["momentum"] = {0.0, 1.5};  // second cell is invalid
  const std::string config = write_config(tmp.path, doc, "sweep.json");
  const std::string out_dir = (tmp.path / "out").string();
  std::ostringstream out, err;
  const int code =
      distef::cli::run_cli({"sweep", "--config", config, "--out", out_dir},
                           out, err);
  CHECK(code == distef::cli::kExitRuntimeFailure);
  const json index =
      json::parse(file_bytes(fs::path(out_dir) / "index.json"));
  REQUIRE(index["runs"].size() == 2);
  CHECK(index["runs"][0]["status"] == "ok");
  CHECK(index["runs"][1]["status"] != "ok");
}

TEST_CASE("verify suite passes and fault injection flips it") {
  std::ostringstream out;
  CHECK(distef::cli::cmd_verify(false, out) == distef::cli::kExitOk);
  CHECK(out.str().find("FAIL") == std::string::npos);
  std::ostringstream fault_out;
  CHECK(distef::cli::cmd_verify(true, fault_out) ==
        distef::cli::kExitRuntimeFailure);
  CHECK(fault_out.str().find("FAIL  iterate-recurrence-sgd") !=
        std::string::npos);
}

TEST_CASE("report merges runs and cross-checks the bits column") {
  TempDir tmp("distef_cli_report");
  json doc = small_run_config();
  const std::string config = write_config(tmp.path, doc);
  const std::string dir_a = (tmp.path / "a").string();
  json doc_b = small_run_config();
  doc_b["optimizer"] = "full_precision";
  doc_b["verify"] = false;
  const std::string config_b = write_config(tmp.path, doc_b, "b.json");
  const std::string dir_b = (tmp.path / "b").string();
  REQUIRE(run_cli_quiet({"run", "--config", config, "--out", dir_a}) == 0);
  REQUIRE(run_cli_quiet({"run", "--config", config_b, "--out", dir_b}) == 0);

  const std::string report_dir = (tmp.path / "report").string();
  std::ostringstream out, err;
  const int code = distef::cli::run_cli(
      {"report", dir_a, dir_b, "--out", report_dir}, out, err);
  CHECK(code == distef::cli::kExitOk);

  std::ifstream merged(fs::path(report_dir) / "comparison.csv");
  REQUIRE(merged.good());
  std::string header;
  std::getline(merged, header);
  CHECK(header ==
        "run,t,loss,grad_norm_sq,error_norm_sq,stepsize,bits_ideal,bits_wire");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(merged, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 80);

  // The per-run bit totals match T x comm_cost for the run's method.
  std::ifstream csv(fs::path(dir_a) / "metrics.csv");
  const auto metrics = distef::read_metrics_csv(csv);
  std::uint64_t total = 0;
  for (const auto& m : metrics) total += m.bits_ideal;
  CHECK(total == 40 * distef::comm_cost(distef::CommMethod::kDistEfBlock, 2,
                                        16, 4));
}

TEST_CASE("report on unreadable directories fails when nothing loads") {
  std::ostringstream out, err;
  CHECK(distef::cli::cmd_report({"/no/such/run"}, "", out, err) ==
        distef::cli::kExitRuntimeFailure);
  CHECK(distef::cli::cmd_report({}, "", out, err) == distef::cli::kExitUsage);
}
