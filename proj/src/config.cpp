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

#include "distef/config.hpp"

#include <fstream>
#include <sstream>

#include "distef/rng.hpp"

namespace distef {

using nlohmann::json;

const char* to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kDistEf:
      return "dist_ef";
    case OptimizerKind::kEfSgd:
      return "ef_sgd";
    case OptimizerKind::kFullPrecision:
      return "full_precision";
    case OptimizerKind::kSignSgd:
      return "sign_sgd";
    case OptimizerKind::kSignum:
      return "signum";
  }
  return "unknown";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "dist_ef" || name == "dist_ef_sgd" || name == "dist-ef") {
    return OptimizerKind::kDistEf;
  }
  if (name == "ef_sgd" || name == "ef-sgd") return OptimizerKind::kEfSgd;
  if (name == "full_precision" || name == "sgd" || name == "sgdm") {
    return OptimizerKind::kFullPrecision;
  }
  if (name == "sign_sgd" || name == "signsgd") return OptimizerKind::kSignSgd;
  if (name == "signum") return OptimizerKind::kSignum;
  throw ConfigError("unknown optimizer: " + name);
}

namespace {

CompressorKind compressor_kind_from_string(const std::string& name) {
  if (name == "identity") return CompressorKind::kIdentity;
  if (name == "scaled_sign") return CompressorKind::kScaledSign;
  if (name == "blockwise_scaled_sign" || name == "blockwise") {
    return CompressorKind::kBlockwiseScaledSign;
  }
  if (name == "top_k" || name == "topk") return CompressorKind::kTopK;
  if (name == "unbiased_scaled") return CompressorKind::kUnbiasedScaled;
  throw ConfigError("unknown compressor kind: " + name);
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "constant") return ScheduleKind::kConstant;
  if (name == "decreasing") return ScheduleKind::kDecreasing;
  if (name == "increasing") return ScheduleKind::kIncreasing;
  if (name == "hybrid_warmup" || name == "hybrid") {
    return ScheduleKind::kHybridWarmup;
  }
  throw ConfigError("unknown schedule kind: " + name);
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "quadratic") return ProblemKind::kQuadratic;
  if (name == "logistic") return ProblemKind::kLogistic;
  if (name == "mlp") return ProblemKind::kMlp;
  throw ConfigError("unknown problem kind: " + name);
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

ProblemSpec parse_problem(const json& doc, std::uint64_t run_seed) {
  ProblemSpec spec;
  spec.kind = problem_kind_from_string(get_or<std::string>(doc, "kind", "quadratic"));
  spec.dim = get_or<std::size_t>(doc, "dim", 1);
  spec.samples = get_or<std::size_t>(doc, "samples", 0);
  spec.condition_number = get_or<double>(doc, "condition_number", 1.0);
  spec.sigma = get_or<double>(doc, "sigma", 0.0);
  spec.layers = get_or<std::vector<std::size_t>>(doc, "layers", {});
  // Without an explicit dataset seed, pair it to the run seed so sweep
  // repetitions vary the data while grid cells share it.
  if (doc.contains("seed")) {
    spec.seed = doc.at("seed").get<std::uint64_t>();
  } else {
    spec.seed = mix_seed(run_seed, stream::kDataset);
  }
  return spec;
}

CompressorSpec parse_compressor(const json& doc, std::size_t dim,
                                const BlockPartition& natural,
                                std::uint64_t run_seed) {
  const std::string kind_name = get_or<std::string>(doc, "kind", "identity");
  const CompressorKind kind = compressor_kind_from_string(kind_name);
  switch (kind) {
    case CompressorKind::kIdentity:
      return CompressorSpec::identity(dim);
    case CompressorKind::kScaledSign:
      return CompressorSpec::scaled_sign(dim);
    case CompressorKind::kTopK:
      return CompressorSpec::top_k(dim, get_or<std::size_t>(doc, "k", 1));
    case CompressorKind::kUnbiasedScaled: {
      const double c = get_or<double>(doc, "c", 1.0 / static_cast<double>(dim));
      const std::uint64_t seed =
          doc.contains("seed") ? doc.at("seed").get<std::uint64_t>()
                               : mix_seed(run_seed, stream::kCompressor);
      return CompressorSpec::unbiased_scaled(dim, c, seed);
    }
    case CompressorKind::kBlockwiseScaledSign:
      break;
  }
  // Blockwise: resolve the partition description.
  BlockPartition partition = BlockPartition::single(dim);
  if (doc.contains("partition")) {
    const json& p = doc.at("partition");
    const std::string mode = get_or<std::string>(p, "mode", "whole");
    if (mode == "whole") {
      partition = BlockPartition::single(dim);
    } else if (mode == "equal") {
      partition =
          BlockPartition::equal_split(dim, get_or<std::size_t>(p, "blocks", 1));
    } else if (mode == "natural") {
      partition = natural;
    } else if (mode == "sizes") {
      partition = make_partition(
          get_or<std::vector<std::size_t>>(p, "sizes", {}));
      if (partition.dim() != dim) {
        throw ConfigError("compressor partition sizes do not sum to dim");
      }
    } else {
      throw ConfigError("unknown partition mode: " + mode);
    }
  }
  return CompressorSpec::blockwise_scaled_sign(std::move(partition));
}

ScheduleSpec parse_schedule(const json& doc, std::size_t iterations,
                            std::size_t workers, double compressor_delta) {
  ScheduleSpec sched;
  sched.kind = schedule_kind_from_string(get_or<std::string>(doc, "kind", "constant"));
  sched.gamma = get_or<double>(doc, "gamma", 0.1);
  sched.horizon = iterations == 0 ? 1 : iterations;
  sched.workers = workers;
  sched.delta = get_or<double>(doc, "delta", compressor_delta);
  sched.warmup = get_or<std::size_t>(doc, "warmup", 0);
  return sched;
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.workers == 0) throw ConfigError("workers must be >= 1");
  if (config.iterations == 0) throw ConfigError("iterations must be >= 1");
  if (config.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (config.dim == 0) throw ConfigError("problem dimension must be >= 1");
  if (!(config.momentum >= 0.0) || config.momentum >= 1.0) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (config.weight_decay < 0.0) {
    throw ConfigError("weight_decay must be >= 0");
  }
  if (!(config.x0_scale >= 0.0)) throw ConfigError("x0_scale must be >= 0");
  try {
    distef::validate(config.compressor);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (config.compressor.dim != config.dim) {
    throw ConfigError("compressor dimension does not match the problem");
  }
  distef::validate(config.schedule);
  if (config.optimizer == OptimizerKind::kEfSgd) {
    if (config.workers != 1) {
      throw ConfigError("ef_sgd is single-machine; workers must be 1");
    }
    if (config.weight_decay != 0.0 || config.momentum != 0.0) {
      throw ConfigError("ef_sgd supports neither weight decay nor momentum");
    }
  }
  if (config.wire_mode) {
    const bool sign_family =
        config.compressor.kind == CompressorKind::kScaledSign ||
        config.compressor.kind == CompressorKind::kBlockwiseScaledSign;
    if (!sign_family || (config.optimizer != OptimizerKind::kDistEf &&
                         config.optimizer != OptimizerKind::kEfSgd)) {
      throw ConfigError("wire_mode requires a sign compressor and dist_ef/ef_sgd");
    }
  }
  if (config.problem.kind == ProblemKind::kMlp && config.problem.layers.size() < 3) {
    throw ConfigError("mlp problem needs layers [in, hidden..., out]");
  }
}

RunConfig parse_run_config(const json& doc) {
  try {
    RunConfig config;
    config.seed = get_or<std::uint64_t>(doc, "seed", 0);
    config.workers = get_or<std::size_t>(doc, "workers", 1);
    config.iterations = get_or<std::size_t>(doc, "iterations", 1);
    config.batch_size = get_or<std::size_t>(doc, "batch_size", 1);
    config.optimizer =
        optimizer_from_string(get_or<std::string>(doc, "optimizer", "dist_ef"));
    config.momentum = get_or<double>(doc, "momentum", 0.0);
    config.weight_decay = get_or<double>(doc, "weight_decay", 0.0);
    config.x0_scale = get_or<double>(doc, "x0_scale", 1.0);
    config.wire_mode = get_or<bool>(doc, "wire_mode", false);
    config.verify = get_or<bool>(doc, "verify", false);
    config.fault_inject = get_or<bool>(doc, "fault_inject", false);

    if (!doc.contains("problem")) throw ConfigError("missing 'problem' section");
    config.problem = parse_problem(doc.at("problem"), config.seed);
    const auto oracle = make_oracle(config.problem);
    config.dim = oracle->dim();
    config.problem.dim =
        config.problem.kind == ProblemKind::kMlp ? config.problem.dim : config.dim;

    config.compressor = parse_compressor(
        doc.contains("compressor") ? doc.at("compressor") : json::object(),
        config.dim, oracle->natural_partition(), config.seed);

    config.schedule = parse_schedule(
        doc.contains("schedule") ? doc.at("schedule") : json::object(),
        config.iterations, config.workers,
        delta_lower_bound(config.compressor));

    validate(config);
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

json run_config_to_json(const RunConfig& config) {
  json doc;
  doc["seed"] = config.seed;
  doc["workers"] = config.workers;
  doc["iterations"] = config.iterations;
  doc["batch_size"] = config.batch_size;
  doc["optimizer"] = to_string(config.optimizer);
  doc["momentum"] = config.momentum;
  doc["weight_decay"] = config.weight_decay;
  doc["x0_scale"] = config.x0_scale;
  doc["wire_mode"] = config.wire_mode;
  doc["verify"] = config.verify;
  if (config.fault_inject) doc["fault_inject"] = true;

  json problem;
  problem["kind"] = to_string(config.problem.kind);
  problem["dim"] = config.problem.dim;
  problem["samples"] = config.problem.samples;
  problem["condition_number"] = config.problem.condition_number;
  problem["sigma"] = config.problem.sigma;
  if (!config.problem.layers.empty()) problem["layers"] = config.problem.layers;
  problem["seed"] = config.problem.seed;
  doc["problem"] = problem;

  json compressor;
  compressor["kind"] = to_string(config.compressor.kind);
  switch (config.compressor.kind) {
    case CompressorKind::kTopK:
      compressor["k"] = config.compressor.k;
      break;
    case CompressorKind::kUnbiasedScaled:
      compressor["c"] = config.compressor.c;
      compressor["seed"] = config.compressor.rng_seed;
      break;
    case CompressorKind::kBlockwiseScaledSign:
      compressor["partition"] = {
          {"mode", "sizes"}, {"sizes", config.compressor.partition.sizes()}};
      break;
    default:
      break;
  }
  doc["compressor"] = compressor;

  json schedule;
  schedule["kind"] = to_string(config.schedule.kind);
  schedule["gamma"] = config.schedule.gamma;
  schedule["delta"] = config.schedule.delta;
  if (config.schedule.warmup != 0) schedule["warmup"] = config.schedule.warmup;
  doc["schedule"] = schedule;
  return doc;
}

void set_json_path(json& doc, const std::string& path, json value) {
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("empty key in path: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // bare strings need no quotes
  }
  set_json_path(doc, path, std::move(value));
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace distef
