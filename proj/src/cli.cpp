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

#include "distef/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "distef/compressor.hpp"
#include "distef/config.hpp"
#include "distef/harness.hpp"
#include "distef/optim.hpp"
#include "distef/problem.hpp"
#include "distef/rng.hpp"
#include "distef/wire.hpp"

namespace distef::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string output_root() {
  const char* env = std::getenv(kOutputRootEnv);
  return env != nullptr && *env != '\0' ? std::string(env)
                                        : std::string("runs");
}

std::string default_run_dir(const std::string& config_path,
                            std::uint64_t seed) {
  const std::string stem = fs::path(config_path).stem().string();
  return (fs::path(output_root()) / (stem + "-seed" + std::to_string(seed)))
      .string();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValueError("cannot write " + path.string());
  out << content;
}

void write_run_outputs(const fs::path& dir, const RunConfig& config,
                       const RunResult& result) {
  fs::create_directories(dir);
  std::ostringstream csv;
  write_metrics_csv(csv, result.metrics);
  write_text_file(dir / "metrics.csv", csv.str());
  write_text_file(dir / "summary.json",
                  make_run_summary(config, result).dump(2) + "\n");
}

}  // namespace

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides, std::ostream& out,
            std::ostream& err) {
  RunConfig config;
  try {
    json doc = load_json_file(config_path);
    for (const std::string& o : overrides) apply_override(doc, o);
    config = parse_run_config(doc);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path dir =
      out_dir.empty() ? default_run_dir(config_path, config.seed) : out_dir;
  try {
    const RunResult result = run_experiment(config);
    write_run_outputs(dir, config, result);
    out << "run complete: " << dir.string() << "\n";
    out << "  final loss          " << result.final_loss << "\n";
    out << "  final ||grad||^2    " << result.final_grad_norm_sq << "\n";
    if (!std::isnan(result.sampled_grad_norm_sq)) {
      out << "  sampled ||grad||^2  " << result.sampled_grad_norm_sq << "\n";
    }
    out << "  bits (ideal/wire)   " << result.total_bits_ideal << " / "
        << result.total_bits_wire << "\n";
    if (config.verify && !result.verification.passed()) {
      err << "verification FAILED (see summary.json)\n";
      return kExitRuntimeFailure;
    }
    return kExitOk;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << "\n";
    return kExitRuntimeFailure;
  } catch (const Error& e) {
    err << "run failed: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

namespace {

struct SweepCell {
  std::vector<std::pair<std::string, json>> assignments;
};

std::vector<SweepCell> expand_grid(const json& grid) {
  std::vector<SweepCell> cells{SweepCell{}};
  // Deterministic order: json objects iterate in sorted key order.
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) {
      throw ConfigError("sweep grid values must be nonempty arrays: " + key);
    }
    std::vector<SweepCell> next;
    next.reserve(cells.size() * values.size());
    for (const SweepCell& cell : cells) {
      for (const json& v : values) {
        SweepCell extended = cell;
        extended.assignments.emplace_back(key, v);
        next.push_back(std::move(extended));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

}  // namespace

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& overrides, std::ostream& out,
              std::ostream& err) {
  json doc;
  json base;
  std::vector<SweepCell> cells;
  std::size_t repetitions = 1;
  try {
    doc = load_json_file(config_path);
    if (!doc.contains("base") || !doc.contains("grid") ||
        !doc.at("grid").is_object() || doc.at("grid").empty()) {
      throw ConfigError("sweep config needs 'base' and a nonempty 'grid'");
    }
    base = doc.at("base");
    for (const std::string& o : overrides) apply_override(base, o);
    cells = expand_grid(doc.at("grid"));
    repetitions = doc.value("repetitions", std::size_t{1});
    if (repetitions == 0) throw ConfigError("repetitions must be >= 1");
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path root =
      out_dir.empty()
          ? fs::path(output_root()) /
                (fs::path(config_path).stem().string() + "-sweep")
          : fs::path(out_dir);
  fs::create_directories(root);

  const std::uint64_t base_seed = base.value("seed", std::uint64_t{0});
  json index = json::array();
  std::size_t failures = 0;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      char name[64];
      std::snprintf(name, sizeof(name), "cell%03zu_rep%zu", ci, rep);
      const fs::path dir = root / name;
      json cell_doc = base;
      for (const auto& [key, value] : cells[ci].assignments) {
        set_json_path(cell_doc, key, value);
      }
      // Repetitions vary the seed; grid cells at the same repetition share
      // it, so comparisons across cells are paired.
      cell_doc["seed"] = base_seed + rep;
      json entry;
      entry["dir"] = name;
      entry["seed"] = base_seed + rep;
      entry["repetition"] = rep;
      for (const auto& [key, value] : cells[ci].assignments) {
        entry["grid"][key] = value;
      }
      try {
        const RunConfig config = parse_run_config(cell_doc);
        const RunResult result = run_experiment(config);
        write_run_outputs(dir, config, result);
        entry["status"] = "ok";
        entry["final_loss"] = result.final_loss;
        entry["final_grad_norm_sq"] = result.final_grad_norm_sq;
      } catch (const Error& e) {
        entry["status"] = std::string("failed: ") + e.what();
        ++failures;
      }
      index.push_back(std::move(entry));
    }
  }
  json index_doc;
  index_doc["runs"] = index;
  index_doc["cells"] = cells.size();
  index_doc["repetitions"] = repetitions;
  write_text_file(root / "index.json", index_doc.dump(2) + "\n");
  out << "sweep complete: " << cells.size() << " cells x " << repetitions
      << " repetitions, " << failures << " failures -> " << root.string()
      << "\n";
  return failures == 0 ? kExitOk : kExitRuntimeFailure;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(3) << v;
  return ss.str();
}

ParamVector random_vector(Rng& rng, std::size_t dim, int family) {
  ParamVector v(dim, 0.0);
  bool nonzero = false;
  for (std::size_t i = 0; i < dim; ++i) {
    switch (family) {
      case 0:  // gaussian
        v[i] = rng.normal();
        break;
      case 1:  // heavy-tailed (t with 2 dof)
        v[i] = rng.normal() / std::sqrt(rng.exponential() + 1e-12);
        break;
      default:  // sparse
        v[i] = rng.uniform() < 0.9 ? 0.0 : rng.normal();
        break;
    }
    nonzero = nonzero || v[i] != 0.0;
  }
  if (!nonzero) v[0] = 1.0;
  return v;
}

// Blockwise magnitude pattern: entries in one block share a scale, scales
// vary across blocks. This is the regime where blockwise scaling wins.
ParamVector layered_vector(Rng& rng, const BlockPartition& partition) {
  ParamVector v(partition.dim());
  double scale = 1.0;
  for (const auto& block : partition.blocks()) {
    for (std::size_t i = block.offset; i < block.offset + block.size; ++i) {
      const double jitter = 1.0 + 0.1 * rng.normal();
      v[i] = scale * jitter * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    }
    scale *= 4.0;
  }
  return v;
}

RunConfig quadratic_run_config(std::uint64_t seed, double mu,
                               CompressorKind kind, ScheduleKind sched_kind) {
  RunConfig config;
  config.seed = seed;
  config.workers = 4;
  config.iterations = 150;
  config.batch_size = 1;
  config.optimizer = OptimizerKind::kDistEf;
  config.momentum = mu;
  config.verify = true;
  config.problem.kind = ProblemKind::kQuadratic;
  config.problem.dim = 50;
  config.problem.condition_number = 10.0;
  config.problem.sigma = 1.0;
  config.problem.seed = mix_seed(seed, stream::kDataset);
  config.dim = 50;
  switch (kind) {
    case CompressorKind::kScaledSign:
      config.compressor = CompressorSpec::scaled_sign(50);
      break;
    case CompressorKind::kBlockwiseScaledSign:
      config.compressor = CompressorSpec::blockwise_scaled_sign(
          BlockPartition::equal_split(50, 10));
      break;
    case CompressorKind::kTopK:
      config.compressor = CompressorSpec::top_k(50, 25);
      break;
    default:
      config.compressor = CompressorSpec::identity(50);
      break;
  }
  config.schedule.kind = sched_kind;
  // Momentum multiplies the effective stepsize by 1/(1-mu); keep the
  // product safely inside the stability region of the L = 10 quadratic.
  config.schedule.gamma = 0.02 * (1.0 - mu);
  config.schedule.horizon = config.iterations;
  config.schedule.workers = config.workers;
  config.schedule.delta = delta_lower_bound(config.compressor);
  return config;
}

CheckResult check_compressor_contraction() {
  CheckResult r{"compressor-contraction", true, ""};
  Rng rng(20260810);
  const std::size_t dim = 64;
  std::vector<CompressorSpec> specs = {
      CompressorSpec::identity(dim), CompressorSpec::scaled_sign(dim),
      CompressorSpec::blockwise_scaled_sign(make_partition({8, 16, 40})),
      CompressorSpec::top_k(dim, 16)};
  double max_excess = -1.0;
  for (const CompressorSpec& spec : specs) {
    const double delta = delta_lower_bound(spec);
    for (int family = 0; family < 3; ++family) {
      for (int i = 0; i < 500; ++i) {
        const ParamVector v = random_vector(rng, dim, family);
        const ParamVector c = compress(spec, v);
        double err = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
          const double diff = c[j] - v[j];
          err += diff * diff;
        }
        const double budget = l2_norm_squared(v);
        const double excess = (err - (1.0 - delta) * budget) / budget;
        max_excess = std::max(max_excess, excess);
      }
    }
  }
  // Randomized kind: the contract holds in expectation.
  {
    const CompressorSpec spec =
        CompressorSpec::unbiased_scaled(dim, 1.0 / dim, 77);
    Rng crng(spec.rng_seed);
    const ParamVector v = random_vector(rng, dim, 0);
    const double budget = l2_norm_squared(v);
    double mean = 0.0, m2 = 0.0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
      const ParamVector c = compress(spec, v, crng);
      double err = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double diff = c[j] - v[j];
        err += diff * diff;
      }
      const double ratio = err / budget;
      const double delta_mean = ratio - mean;
      mean += delta_mean / (i + 1);
      m2 += delta_mean * (ratio - mean);
    }
    const double se = std::sqrt(m2 / (draws - 1) / draws);
    const double excess = mean - (1.0 - spec.c) - 4.0 * se;
    max_excess = std::max(max_excess, excess);
  }
  r.pass = max_excess <= 1e-12;
  r.detail = "max excess " + sci(max_excess) + " (limit 1e-12)";
  return r;
}

CheckResult check_blockwise_error_identity() {
  CheckResult r{"blockwise-error-identity", true, ""};
  Rng rng(31);
  double max_rel = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t blocks = 1 + rng.uniform_index(8);
    std::vector<std::size_t> sizes(blocks);
    std::size_t dim = 0;
    for (auto& s : sizes) {
      s = 1 + rng.uniform_index(12);
      dim += s;
    }
    const BlockPartition partition = make_partition(sizes);
    const ParamVector v = random_vector(rng, dim, trial % 3);
    const CompressorSpec spec =
        CompressorSpec::blockwise_scaled_sign(partition);
    const ParamVector c = compress(spec, v);
    double lhs = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double diff = c[i] - v[i];
      lhs += diff * diff;
    }
    double rhs = 0.0;
    for (const auto& block : partition.blocks()) {
      double l1 = 0.0, l2sq = 0.0;
      for (std::size_t i = block.offset; i < block.offset + block.size; ++i) {
        l1 += std::fabs(v[i]);
        l2sq += v[i] * v[i];
      }
      if (l2sq == 0.0) continue;
      rhs += (1.0 - l1 * l1 / (static_cast<double>(block.size) * l2sq)) * l2sq;
    }
    const double scale = std::max(lhs, 1e-300);
    max_rel = std::max(max_rel, std::fabs(lhs - rhs) / scale);
  }
  r.pass = max_rel <= 1e-10;
  r.detail = "max relative defect " + sci(max_rel) + " (limit 1e-10)";
  return r;
}

CheckResult check_geometric_example() {
  CheckResult r{"geometric-example", true, ""};
  const double alpha = 0.5;
  const std::size_t blocks = 100;
  ParamVector v(blocks);
  double magnitude = 1.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    v[b] = magnitude * (b % 2 == 0 ? 1.0 : -1.0);
    magnitude /= alpha;  // increasing across blocks
  }
  const BlockPartition partition = BlockPartition::equal_split(blocks, blocks);
  const double phi_value = phi(v, partition);
  const double measured =
      empirical_delta(CompressorSpec::scaled_sign(blocks), v);
  const double b_real = static_cast<double>(blocks);
  const double expected = (1.0 + alpha) * (1.0 - std::pow(alpha, b_real)) /
                          (b_real * (1.0 - alpha) *
                           (1.0 + std::pow(alpha, b_real)));
  const double rel = std::fabs(measured - expected) / expected;
  r.pass = phi_value == 1.0 && rel <= 1e-9;
  r.detail = "phi " + sci(phi_value) + ", non-block delta error " + sci(rel);
  return r;
}

CheckResult check_delta_ordering() {
  CheckResult r{"delta-bounds-ordering", true, ""};
  Rng rng(47);
  double worst = 1.0;
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const BlockPartition partition =
        make_partition({4, 8, 4, 16, 8, 8, 4, 12});
    const ParamVector v = layered_vector(rng, partition);
    const CompressorSpec blockwise =
        CompressorSpec::blockwise_scaled_sign(partition);
    const double phi_value = phi(v, partition);
    const double block_delta = empirical_delta(blockwise, v);
    const double whole_delta =
        empirical_delta(CompressorSpec::scaled_sign(v.size()), v);
    ok = ok && block_delta >= phi_value - 1e-12;
    ok = ok && phi_value >=
                   1.0 / static_cast<double>(partition.max_block_size()) - 1e-15;
    ok = ok && phi_value >= whole_delta;  // layered blocks: blockwise wins
    worst = std::min(worst, phi_value - whole_delta);
  }
  r.pass = ok;
  r.detail = "min (phi - whole-vector delta) " + sci(worst);
  return r;
}

CheckResult check_recurrence_run(const char* name, double mu,
                                 CompressorKind kind, ScheduleKind sched,
                                 bool fault_inject) {
  CheckResult r{name, true, ""};
  RunConfig config = quadratic_run_config(404, mu, kind, sched);
  config.fault_inject = fault_inject;
  const RunResult result = run_experiment(config);
  const double resid = result.verification.momentum_recurrence_residual;
  r.pass = resid <= kRecurrenceTolerance;
  r.detail = "max residual " + sci(resid) + " (tol 1e-9)";
  return r;
}

CheckResult check_virtual_iterate_run() {
  CheckResult r{"virtual-iterate-recurrence", true, ""};
  RunConfig config = quadratic_run_config(
      505, 0.9, CompressorKind::kBlockwiseScaledSign, ScheduleKind::kConstant);
  const RunResult result = run_experiment(config);
  const double resid = result.verification.virtual_iterate_residual;
  r.pass = resid <= kRecurrenceTolerance;
  r.detail = "max residual " + sci(resid) + " (tol 1e-9)";
  return r;
}

CheckResult check_error_bound_runs() {
  CheckResult r{"error-norm-bound", true, ""};
  double min_margin = std::numeric_limits<double>::infinity();
  for (CompressorKind kind :
       {CompressorKind::kScaledSign, CompressorKind::kBlockwiseScaledSign,
        CompressorKind::kTopK}) {
    for (double mu : {0.0, 0.9}) {
      RunConfig config =
          quadratic_run_config(606, mu, kind, ScheduleKind::kConstant);
      const RunResult result = run_experiment(config);
      min_margin = std::min(min_margin, result.verification.error_bound_margin);
    }
  }
  r.pass = min_margin >= 0.0;
  r.detail = "min margin " + sci(min_margin);
  return r;
}

CheckResult check_identity_equivalence() {
  CheckResult r{"identity-equivalence", true, ""};
  RunConfig ef = quadratic_run_config(707, 0.0, CompressorKind::kIdentity,
                                      ScheduleKind::kConstant);
  RunConfig fp = ef;
  fp.optimizer = OptimizerKind::kFullPrecision;
  fp.verify = false;
  const RunResult a = run_experiment(ef);
  const RunResult b = run_experiment(fp);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < a.final_x.size(); ++i) {
    max_diff = std::max(max_diff, std::fabs(a.final_x[i] - b.final_x[i]));
  }
  r.pass = max_diff <= 1e-12;
  r.detail = "max |x_ef - x_sgd| " + sci(max_diff) + " (limit 1e-12)";
  return r;
}

CheckResult check_comm_cost_table() {
  CheckResult r{"comm-cost-table", true, ""};
  const bool ok =
      comm_cost(CommMethod::kFullPrecision, 7, 1'000'000, 0) == 448'000'000ull &&
      comm_cost(CommMethod::kMajorityVote, 7, 1'000'000, 0) == 14'000'000ull &&
      comm_cost(CommMethod::kDistEfBlock, 7, 1'000'000, 100) == 14'044'800ull;
  r.pass = ok;
  r.detail = ok ? "64Md / 2Md / 2Md+64MB reproduced" : "table mismatch";
  return r;
}

CheckResult check_wire_roundtrip() {
  CheckResult r{"wire-roundtrip", true, ""};
  Rng rng(99);
  bool ok = true;
  for (int trial = 0; trial < 2000 && ok; ++trial) {
    const std::size_t blocks = 1 + rng.uniform_index(5);
    std::vector<std::size_t> sizes(blocks);
    for (auto& s : sizes) s = 1 + rng.uniform_index(24);
    const BlockPartition partition = make_partition(sizes);
    CompressedMessage msg;
    msg.worker_id = static_cast<std::uint32_t>(rng.uniform_index(64));
    msg.iteration = rng.next_u64() >> 20;
    msg.blocks.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      msg.blocks[b].scale = static_cast<float>(rng.uniform() * 8.0);
      msg.blocks[b].positive.resize(partition.block(b).size);
      for (std::size_t i = 0; i < partition.block(b).size; ++i) {
        msg.blocks[b].positive[i] = rng.uniform() < 0.5;
      }
    }
    const auto bytes = encode(msg);
    ok = ok && bytes.size() == encoded_size(partition);
    ok = ok && decode(bytes, partition) == msg;
    if (trial == 0) {
      auto truncated = bytes;
      truncated.pop_back();
      try {
        decode(truncated, partition);
        ok = false;
      } catch (const WireFormatError&) {
      }
    }
  }
  r.pass = ok;
  r.detail = ok ? "2000 messages round-tripped" : "round-trip failure";
  return r;
}

CheckResult check_wire_payload_bits() {
  CheckResult r{"wire-payload-bits", true, ""};
  const BlockPartition partition = make_partition({8, 16, 64, 8});
  const std::size_t bits = 8 * encoded_size(partition);
  // Byte-aligned blocks: d + 32B payload plus the 128-bit header.
  const std::size_t expected = partition.dim() + 32 * partition.num_blocks() +
                               8 * kWireHeaderBytes;
  r.pass = bits == expected;
  r.detail = std::to_string(bits) + " bits (d + 32B + header = " +
             std::to_string(expected) + ")";
  return r;
}

CheckResult check_schedule_shapes() {
  CheckResult r{"stepsize-schedules", true, ""};
  bool ok = true;
  ScheduleSpec dec{ScheduleKind::kDecreasing, 1.0, 16, 1, 1.0, 0};
  ScheduleSpec inc{ScheduleKind::kIncreasing, 1.0, 16, 1, 1.0, 0};
  ok = ok && stepsize(dec, -1) == 0.0 && stepsize_ratio(dec, 0) == 0.0;
  ok = ok && std::fabs(stepsize(dec, 0) - 0.5) < 1e-15;
  ok = ok && std::fabs(stepsize(inc, 0) - 0.0625) < 1e-15;
  ok = ok && std::fabs(stepsize(inc, 15) - 0.25) < 1e-15;
  ScheduleSpec dec2{ScheduleKind::kDecreasing, 0.7, 400, 4, 0.2, 0};
  ScheduleSpec inc2{ScheduleKind::kIncreasing, 0.7, 400, 4, 0.2, 0};
  for (std::int64_t t = 0; t + 1 < 400 && ok; ++t) {
    ok = ok && stepsize(dec2, t) > 0.0 && stepsize(inc2, t) > 0.0;
    ok = ok && stepsize(dec2, t + 1) <= stepsize(dec2, t);
    ok = ok && stepsize(inc2, t + 1) >= stepsize(inc2, t);
  }
  r.pass = ok;
  r.detail = ok ? "boundary values and monotonicity hold" : "shape violation";
  return r;
}

CheckResult check_mu_zero_reduction() {
  CheckResult r{"momentum-zero-reduction", true, ""};
  Rng rng(121);
  const std::size_t dim = 40;
  const CompressorSpec spec = CompressorSpec::blockwise_scaled_sign(
      BlockPartition::equal_split(dim, 8));
  WorkerState plain = WorkerState::init(0, dim);
  WorkerState with_momentum = WorkerState::init(0, dim);
  bool identical = true;
  for (int t = 0; t < 100 && identical; ++t) {
    ParamVector g(dim);
    for (double& v : g) v = rng.normal();
    const double ratio = t == 0 ? 0.0 : 1.0;
    WorkerStep a = worker_step(plain, g, ratio, spec);
    WorkerStep b = momentum_worker_step(with_momentum, g, ratio, 0.0, spec);
    identical = std::memcmp(a.delta.data(), b.delta.data(),
                            dim * sizeof(double)) == 0 &&
                std::memcmp(a.state.error.data(), b.state.error.data(),
                            dim * sizeof(double)) == 0;
    plain = std::move(a.state);
    with_momentum = std::move(b.state);
  }
  r.pass = identical;
  r.detail = identical ? "100 steps bitwise equal" : "outputs differ";
  return r;
}

}  // namespace

int cmd_verify(bool fault_inject, std::ostream& out) {
  std::vector<CheckResult> results;
  const auto guarded = [&results](const char* name,
                                  const std::function<CheckResult()>& check) {
    try {
      results.push_back(check());
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded("compressor-contraction", check_compressor_contraction);
  guarded("blockwise-error-identity", check_blockwise_error_identity);
  guarded("geometric-example", check_geometric_example);
  guarded("delta-bounds-ordering", check_delta_ordering);
  guarded("iterate-recurrence-sgd", [fault_inject] {
    return check_recurrence_run("iterate-recurrence-sgd", 0.0,
                                CompressorKind::kScaledSign,
                                ScheduleKind::kConstant, fault_inject);
  });
  guarded("iterate-recurrence-momentum", [] {
    return check_recurrence_run("iterate-recurrence-momentum", 0.9,
                                CompressorKind::kBlockwiseScaledSign,
                                ScheduleKind::kDecreasing, false);
  });
  guarded("virtual-iterate-recurrence", check_virtual_iterate_run);
  guarded("error-norm-bound", check_error_bound_runs);
  guarded("identity-equivalence", check_identity_equivalence);
  guarded("momentum-zero-reduction", check_mu_zero_reduction);
  guarded("comm-cost-table", check_comm_cost_table);
  guarded("wire-roundtrip", check_wire_roundtrip);
  guarded("wire-payload-bits", check_wire_payload_bits);
  guarded("stepsize-schedules", check_schedule_shapes);

  std::size_t failed = 0;
  for (const CheckResult& r : results) {
    out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(28)
        << r.name << " " << r.detail << "\n";
    if (!r.pass) ++failed;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitRuntimeFailure;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

namespace {

struct LoadedRun {
  std::string name;
  std::vector<IterationMetrics> metrics;
  json summary;
};

LoadedRun load_run_dir(const std::string& dir) {
  LoadedRun run;
  run.name = fs::path(dir).filename().string();
  if (run.name.empty()) run.name = dir;
  std::ifstream csv(fs::path(dir) / "metrics.csv");
  if (!csv) throw ValueError("missing metrics.csv in " + dir);
  run.metrics = read_metrics_csv(csv);
  std::ifstream summary(fs::path(dir) / "summary.json");
  if (!summary) throw ValueError("missing summary.json in " + dir);
  run.summary = json::parse(summary);
  return run;
}

}  // namespace

int cmd_report(const std::vector<std::string>& run_dirs,
               const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  if (run_dirs.empty()) {
    err << "report: need at least one run directory\n";
    return kExitUsage;
  }
  std::vector<LoadedRun> runs;
  for (const std::string& dir : run_dirs) {
    try {
      runs.push_back(load_run_dir(dir));
    } catch (const std::exception& e) {
      err << "skipping " << dir << ": " << e.what() << "\n";
    }
  }
  if (runs.empty()) {
    err << "report: no readable runs\n";
    return kExitRuntimeFailure;
  }

  const fs::path root = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(root);
  std::ofstream merged(root / "comparison.csv");
  merged << "run,t,loss,grad_norm_sq,error_norm_sq,stepsize,bits_ideal,"
            "bits_wire\n";
  for (const LoadedRun& run : runs) {
    for (const IterationMetrics& m : run.metrics) {
      merged << run.name << ',' << m.t << ',' << m.loss << ','
             << m.grad_norm_sq << ',' << m.error_norm_sq << ',' << m.stepsize
             << ',' << m.bits_ideal << ',' << m.bits_wire << '\n';
    }
  }
  merged.close();

  out << "wrote " << (root / "comparison.csv").string() << "\n\n";
  out << std::left << std::setw(28) << "run" << std::setw(12) << "iters"
      << std::setw(16) << "final loss" << std::setw(20) << "E||grad(x_o)||^2"
      << "total bits (ideal)\n";
  for (const LoadedRun& run : runs) {
    double final_loss = std::numeric_limits<double>::quiet_NaN();
    if (!run.metrics.empty()) final_loss = run.metrics.back().loss;
    if (run.summary.contains("final") &&
        run.summary["final"]["loss"].is_number()) {
      final_loss = run.summary["final"]["loss"].get<double>();
    }
    // Recompute the sampled-output metric from the recorded series.
    std::string sampled = "n/a";
    if (run.summary.contains("smoothness") &&
        run.summary["smoothness"].is_number() && !run.metrics.empty()) {
      std::vector<double> stepsizes;
      stepsizes.reserve(run.metrics.size());
      for (const IterationMetrics& m : run.metrics) {
        stepsizes.push_back(m.stepsize);
      }
      try {
        const auto weights = sample_output_index(
            stepsizes, run.summary["smoothness"].get<double>());
        double acc = 0.0;
        for (std::size_t t = 0; t < weights.size(); ++t) {
          acc += weights[t] * run.metrics[t].grad_norm_sq;
        }
        sampled = sci(acc);
      } catch (const PreconditionError&) {
      }
    }
    std::uint64_t total_bits = 0;
    for (const IterationMetrics& m : run.metrics) total_bits += m.bits_ideal;
    out << std::left << std::setw(28) << run.name << std::setw(12)
        << run.metrics.size() << std::setw(16) << final_loss << std::setw(20)
        << sampled << total_bits << "\n";
  }
  // Unreadable directories were listed and skipped; only an empty result is
  // an error (handled above).
  return kExitOk;
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"compressed distributed SGD with error feedback"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool fault_inject = false;
  std::vector<std::string> report_dirs;

  CLI::App* run = app.add_subcommand("run", "execute one experiment");
  run->add_option("--config", config_path, "run config JSON")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--set", overrides, "dotted-path override key=value");

  CLI::App* sweep = app.add_subcommand("sweep", "execute a grid of runs");
  sweep->add_option("--config", config_path, "sweep config JSON")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--set", overrides, "override applied to the base config");

  CLI::App* verify =
      app.add_subcommand("verify", "run the numerical invariant suite");
  verify->add_flag("--fault-inject", fault_inject,
                   "corrupt error bookkeeping to prove the checks can fail");

  CLI::App* report =
      app.add_subcommand("report", "merge finished runs into one table");
  report->add_option("dirs", report_dirs, "run directories")->required();
  report->add_option("--out", out_dir, "output directory");

  std::vector<const char*> argv;
  argv.push_back("distef");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, overrides, out, err);
    if (sweep->parsed()) {
      return cmd_sweep(config_path, out_dir, overrides, out, err);
    }
    if (verify->parsed()) return cmd_verify(fault_inject, out);
    if (report->parsed()) return cmd_report(report_dirs, out_dir, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitUsage;
}

}  // namespace distef::cli
