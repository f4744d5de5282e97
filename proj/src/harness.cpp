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

#include "distef/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "distef/optim.hpp"
#include "distef/problem.hpp"
#include "distef/rng.hpp"
#include "distef/wire.hpp"

namespace distef {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::uint64_t comm_cost(CommMethod method, std::uint64_t workers,
                        std::uint64_t dim, std::uint64_t blocks) {
  switch (method) {
    case CommMethod::kFullPrecision:
      return 64 * workers * dim;
    case CommMethod::kMajorityVote:
      return 2 * workers * dim;
    case CommMethod::kDistEfBlock:
      return 2 * workers * dim + 64 * workers * blocks;
  }
  throw PreconditionError("comm_cost: unknown method");
}

namespace {

bool sign_compressed(const RunConfig& config) {
  return config.compressor.kind == CompressorKind::kScaledSign ||
         config.compressor.kind == CompressorKind::kBlockwiseScaledSign;
}

BlockPartition wire_partition(const RunConfig& config) {
  if (config.compressor.kind == CompressorKind::kBlockwiseScaledSign) {
    return config.compressor.partition;
  }
  return BlockPartition::single(config.dim);
}

}  // namespace

CommMethod comm_method_for(const RunConfig& config) {
  switch (config.optimizer) {
    case OptimizerKind::kFullPrecision:
      return CommMethod::kFullPrecision;
    case OptimizerKind::kSignSgd:
    case OptimizerKind::kSignum:
      return CommMethod::kMajorityVote;
    case OptimizerKind::kDistEf:
    case OptimizerKind::kEfSgd:
      // Sign compressors follow the 1-bit cost row; the remaining kinds are
      // simulated at full precision and accounted accordingly.
      return sign_compressed(config) ? CommMethod::kDistEfBlock
                                     : CommMethod::kFullPrecision;
  }
  throw PreconditionError("comm_method_for: unknown optimizer");
}

std::uint64_t bits_ideal_per_iteration(const RunConfig& config) {
  const CommMethod method = comm_method_for(config);
  const std::uint64_t blocks =
      method == CommMethod::kDistEfBlock ? wire_partition(config).num_blocks()
                                         : 0;
  return comm_cost(method, config.workers, config.dim, blocks);
}

std::uint64_t bits_wire_per_iteration(const RunConfig& config) {
  if (comm_method_for(config) != CommMethod::kDistEfBlock) {
    return bits_ideal_per_iteration(config);  // no codec for these runs
  }
  // M pushes plus M pulls per iteration, each one encoded message.
  const std::uint64_t message_bits = 8 * encoded_size(wire_partition(config));
  return 2 * config.workers * message_bits;
}

std::vector<double> sample_output_index(const std::vector<double>& stepsizes,
                                        double smoothness) {
  if (stepsizes.empty()) {
    throw PreconditionError("sample_output_index: empty stepsize sequence");
  }
  if (!(smoothness > 0.0)) {
    throw PreconditionError("sample_output_index: smoothness must be positive");
  }
  std::vector<double> weights(stepsizes.size());
  double total = 0.0;
  for (std::size_t t = 0; t < stepsizes.size(); ++t) {
    const double eta = stepsizes[t];
    if (!(eta > 0.0) || eta >= 1.5 / smoothness) {
      throw PreconditionError(
          "sample_output_index: requires 0 < eta_t < 3/(2L)");
    }
    weights[t] = eta * (3.0 - 2.0 * smoothness * eta);
    total += weights[t];
  }
  for (double& w : weights) w /= total;
  return weights;
}

// ---------------------------------------------------------------------------
// Recurrence checks
// ---------------------------------------------------------------------------

ParamVector error_corrected_iterate(const TraceStep& step) {
  ParamVector out(step.x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = step.x[i] - step.eta_prev * step.error_sum[i];
  }
  return out;
}

namespace {

double pair_residual(const ParamVector& next, const ParamVector& predicted,
                     double scale) {
  double resid = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    resid = std::max(resid, std::fabs(next[i] - predicted[i]));
  }
  return resid / scale;
}

double residual_scale(const ParamVector& a, const ParamVector& b) {
  return std::max({1.0, linf_norm(a), linf_norm(b)});
}

double check_recurrence(const Trace& trace, bool momentum_direction) {
  double max_resid = 0.0;
  for (std::size_t s = 0; s + 1 < trace.steps.size(); ++s) {
    const TraceStep& cur = trace.steps[s];
    const TraceStep& next = trace.steps[s + 1];
    if (next.t != cur.t + 1) continue;  // strided trace: skip gaps
    const ParamVector& dir =
        momentum_direction ? cur.mean_direction : cur.mean_grad;
    const ParamVector xt = error_corrected_iterate(cur);
    const ParamVector xn = error_corrected_iterate(next);
    ParamVector predicted(xt.size());
    for (std::size_t i = 0; i < xt.size(); ++i) {
      predicted[i] = xt[i] - cur.eta * dir[i];
    }
    max_resid = std::max(max_resid,
                         pair_residual(xn, predicted, residual_scale(xt, xn)));
  }
  return max_resid;
}

}  // namespace

double check_iterate_recurrence(const Trace& trace) {
  if (trace.mu != 0.0) {
    throw PreconditionError("check_iterate_recurrence: requires a momentum-free run");
  }
  if (trace.weight_decay != 0.0) {
    throw PreconditionError("check_iterate_recurrence: requires weight decay 0");
  }
  return check_recurrence(trace, /*momentum_direction=*/false);
}

double check_momentum_recurrence(const Trace& trace) {
  if (trace.weight_decay != 0.0) {
    throw PreconditionError("check_momentum_recurrence: requires weight decay 0");
  }
  return check_recurrence(trace, /*momentum_direction=*/true);
}

double check_virtual_iterate(const Trace& trace) {
  if (trace.schedule.kind != ScheduleKind::kConstant) {
    throw PreconditionError("check_virtual_iterate: constant stepsize only");
  }
  if (trace.weight_decay != 0.0) {
    throw PreconditionError("check_virtual_iterate: requires weight decay 0");
  }
  const double eta = trace.schedule.gamma;
  const double mu = trace.mu;
  const double momentum_coeff = eta * mu * mu / (1.0 - mu);
  const double grad_coeff = eta / (1.0 - mu);
  double max_resid = 0.0;
  for (std::size_t s = 0; s + 1 < trace.steps.size(); ++s) {
    const TraceStep& cur = trace.steps[s];
    const TraceStep& next = trace.steps[s + 1];
    if (next.t != cur.t + 1) continue;
    ParamVector zt = error_corrected_iterate(cur);
    ParamVector zn = error_corrected_iterate(next);
    for (std::size_t i = 0; i < zt.size(); ++i) {
      zt[i] -= momentum_coeff * cur.mean_momentum_prev[i];
      zn[i] -= momentum_coeff * next.mean_momentum_prev[i];
    }
    ParamVector predicted(zt.size());
    for (std::size_t i = 0; i < zt.size(); ++i) {
      predicted[i] = zt[i] - grad_coeff * cur.mean_grad[i];
    }
    max_resid = std::max(max_resid,
                         pair_residual(zn, predicted, residual_scale(zt, zn)));
  }
  return max_resid;
}

ErrorBoundCheck check_error_bound(const Trace& trace, double delta_lb,
                                  double mu, double g_estimate) {
  if (!(delta_lb > 0.0) || delta_lb > 1.0) {
    throw PreconditionError("check_error_bound: delta must lie in (0, 1]");
  }
  ErrorBoundCheck out;
  const double g_sq = g_estimate * g_estimate;
  const double d2 = delta_lb * delta_lb;
  out.bound = 8.0 * (1.0 - delta_lb) * g_sq / (d2 * (1.0 - mu) * (1.0 - mu)) *
              (1.0 + 16.0 / d2);
  out.max_observed = 0.0;
  for (const TraceStep& step : trace.steps) {
    out.max_observed =
        std::max(out.max_observed, l2_norm_squared(step.error_sum));
  }
  out.margin = out.bound - out.max_observed;
  return out;
}

bool VerificationReport::recurrence_ok() const {
  // NaN marks a check that does not apply; NaN comparisons are false.
  return !(iterate_recurrence_residual > tolerance) && !(momentum_recurrence_residual > tolerance) &&
         !(virtual_iterate_residual > tolerance);
}

bool VerificationReport::error_bound_ok() const {
  return !(error_bound_margin < 0.0);
}

namespace {

nlohmann::json json_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json doc;
  doc["enabled"] = report.enabled;
  doc["tolerance"] = report.tolerance;
  doc["iterate_recurrence_residual"] = json_or_null(report.iterate_recurrence_residual);
  doc["momentum_recurrence_residual"] = json_or_null(report.momentum_recurrence_residual);
  doc["virtual_iterate_residual"] =
      json_or_null(report.virtual_iterate_residual);
  doc["delta_lower_bound"] = json_or_null(report.delta_lower_bound);
  doc["g_estimate"] = json_or_null(report.g_estimate);
  doc["error_bound"] = json_or_null(report.error_bound);
  doc["error_bound_margin"] = json_or_null(report.error_bound_margin);
  doc["recurrence_ok"] = report.recurrence_ok();
  doc["error_bound_ok"] = report.error_bound_ok();
  // The bound statement is about expectations; we check the stronger
  // per-trajectory form with empirically estimated G.
  doc["error_bound_note"] = "empirical per-trajectory check";
  return doc;
}

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

namespace {

ParamVector mean_of(const std::vector<ParamVector>& vs) {
  ParamVector out(vs.front().size(), 0.0);
  for (const ParamVector& v : vs) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(vs.size());
  for (double& x : out) x *= inv;
  return out;
}

void check_divergence(double loss, const ParamVector& x, std::int64_t t) {
  if (!std::isfinite(loss) || std::fabs(loss) > kDivergenceLimit ||
      linf_norm(x) > kDivergenceLimit) {
    throw DivergenceError("run diverged at iteration " + std::to_string(t), t);
  }
}

}  // namespace

RunResult run_experiment(const RunConfig& config) {
  // T = 0 is a permitted degenerate run (empty series, x stays at x0); all
  // other RunConfig invariants are enforced.
  {
    RunConfig probe = config;
    probe.iterations = std::max<std::size_t>(config.iterations, 1);
    validate(probe);
  }

  const auto oracle = make_oracle(config.problem);
  const std::size_t dim = oracle->dim();
  if (dim != config.dim) {
    throw ConfigError("run_experiment: config dim does not match problem");
  }
  const std::size_t num_workers = config.workers;
  const std::int64_t iterations = static_cast<std::int64_t>(config.iterations);
  const double mu = config.momentum;
  const bool is_dist_ef = config.optimizer == OptimizerKind::kDistEf;

  ParamVector x(dim);
  {
    Rng rng(mix_seed(config.seed, stream::kInitialPoint));
    for (double& v : x) v = config.x0_scale * rng.normal();
  }

  std::vector<WorkerState> workers;
  workers.reserve(num_workers);
  for (std::size_t i = 0; i < num_workers; ++i) {
    workers.push_back(WorkerState::init(i, dim));
  }
  ServerState server = ServerState::init(dim);
  DecoupledWeightDecay wd =
      DecoupledWeightDecay::init(config.weight_decay, dim);
  ParamVector single_error(dim, 0.0);  // ef_sgd residual

  CompressFn compress_fn;
  if (is_dist_ef || config.optimizer == OptimizerKind::kEfSgd) {
    if (config.wire_mode) {
      const BlockPartition partition = wire_partition(config);
      compress_fn = [partition](const ParamVector& v) {
        return wire_roundtrip_compress(v, partition);
      };
    } else {
      compress_fn = make_compress_fn(config.compressor);
    }
  }

  const std::uint64_t bits_ideal = bits_ideal_per_iteration(config);
  const std::uint64_t bits_wire = bits_wire_per_iteration(config);

  // Verification: recurrence residuals accumulate online over every
  // iteration; the retained trace obeys the element limit by striding over
  // adjacent step pairs.
  const bool recurrence_applicable =
      config.verify && is_dist_ef && config.weight_decay == 0.0;
  const bool virtual_applicable =
      recurrence_applicable && config.schedule.kind == ScheduleKind::kConstant;
  const bool record_trace = config.verify && is_dist_ef;

  std::size_t trace_stride = 1;
  if (record_trace) {
    const std::size_t elements = dim * (config.iterations + 1);
    if (elements > kTraceElementLimit) {
      trace_stride =
          (2 * elements + kTraceElementLimit - 1) / kTraceElementLimit;
    }
  }
  const auto keep_in_trace = [&](std::int64_t t) {
    return record_trace && static_cast<std::size_t>(t) % trace_stride <= 1;
  };

  const double virt_momentum_coeff =
      config.schedule.gamma * mu * mu / (1.0 - mu);
  const double virt_grad_coeff = config.schedule.gamma / (1.0 - mu);

  bool have_prediction = false;
  double max_recurrence = 0.0;
  double max_virtual = 0.0;
  double max_error_norm_sq = 0.0;
  double g_estimate = 0.0;
  double pred_scale = 1.0;
  ParamVector predicted_xtilde;
  ParamVector predicted_z;

  RunResult result;
  result.smoothness = oracle->smoothness();
  result.metrics.reserve(config.iterations);
  result.trace.mu = mu;
  result.trace.weight_decay = config.weight_decay;
  result.trace.schedule = config.schedule;

  const auto mean_worker_errors_plus_server = [&]() {
    ParamVector out(dim, 0.0);
    for (const WorkerState& w : workers) {
      for (std::size_t i = 0; i < dim; ++i) out[i] += w.error[i];
    }
    const double inv_m = 1.0 / static_cast<double>(num_workers);
    for (std::size_t i = 0; i < dim; ++i) {
      out[i] = server.error[i] + out[i] * inv_m;
    }
    return out;
  };
  const auto mean_worker_momentum = [&]() {
    ParamVector out(dim, 0.0);
    for (const WorkerState& w : workers) {
      for (std::size_t i = 0; i < dim; ++i) out[i] += w.momentum[i];
    }
    const double inv_m = 1.0 / static_cast<double>(num_workers);
    for (double& v : out) v *= inv_m;
    return out;
  };

  for (std::int64_t t = 0; t < iterations; ++t) {
    const double eta = stepsize(config.schedule, t);
    const double eta_prev = stepsize(config.schedule, t - 1);
    const double ratio = stepsize_ratio(config.schedule, t);

    std::vector<ParamVector> grads;
    grads.reserve(num_workers);
    for (std::size_t i = 0; i < num_workers; ++i) {
      grads.push_back(oracle->stochastic_gradient(
          x, config.seed, static_cast<std::uint64_t>(t),
          static_cast<std::uint32_t>(i), config.batch_size));
    }

    const double loss = oracle->loss(x);
    const ParamVector exact_grad = oracle->exact_gradient(x);
    check_divergence(loss, x, t);

    // e~_t + (1/M) sum_i e_{t,i} for the states entering this iteration.
    ParamVector error_sum;
    if (config.optimizer == OptimizerKind::kEfSgd) {
      error_sum = single_error;
    } else {
      error_sum = mean_worker_errors_plus_server();
    }

    IterationMetrics row;
    row.t = t;
    row.loss = loss;
    row.grad_norm_sq = l2_norm_squared(exact_grad);
    row.error_norm_sq = l2_norm_squared(error_sum);
    row.stepsize = eta;
    row.bits_ideal = bits_ideal;
    row.bits_wire = bits_wire;
    result.metrics.push_back(row);

    for (const ParamVector& g : grads) {
      g_estimate = std::max(g_estimate, std::sqrt(l2_norm_squared(g)));
    }
    max_error_norm_sq = std::max(max_error_norm_sq, row.error_norm_sq);

    const bool record_step = keep_in_trace(t);
    ParamVector xtilde;
    ParamVector mean_momentum_prev;
    if (recurrence_applicable || record_step) {
      xtilde.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        xtilde[i] = x[i] - eta_prev * error_sum[i];
      }
      if (virtual_applicable || record_step) {
        mean_momentum_prev = mean_worker_momentum();
      }
    }

    // Residuals against the predictions formed at the end of iteration t-1.
    if (recurrence_applicable && have_prediction) {
      const double scale =
          std::max(pred_scale, std::max(1.0, linf_norm(xtilde)));
      max_recurrence = std::max(
          max_recurrence, pair_residual(xtilde, predicted_xtilde, scale));
      if (virtual_applicable) {
        ParamVector z(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          z[i] = xtilde[i] - virt_momentum_coeff * mean_momentum_prev[i];
        }
        const double zscale = std::max(pred_scale, std::max(1.0, linf_norm(z)));
        max_virtual =
            std::max(max_virtual, pair_residual(z, predicted_z, zscale));
      }
    }

    TraceStep pending;
    if (record_step) {
      pending.t = t;
      pending.eta = eta;
      pending.eta_prev = eta_prev;
      pending.x = x;
      pending.error_sum = error_sum;
      pending.mean_momentum_prev = mean_momentum_prev;
    }

    // Advance one iteration of the configured optimizer.
    ParamVector mean_grad;
    ParamVector mean_direction;
    switch (config.optimizer) {
      case OptimizerKind::kDistEf: {
        std::vector<ParamVector> deltas(num_workers);
        for (std::size_t i = 0; i < num_workers; ++i) {
          WorkerStep step =
              mu == 0.0
                  ? worker_step(workers[i], grads[i], ratio, compress_fn)
                  : momentum_worker_step(workers[i], grads[i], ratio, mu,
                                         compress_fn);
          deltas[i] = std::move(step.delta);
          workers[i] = std::move(step.state);
        }
        if (config.fault_inject) {
          workers[0].error[0] += 1e-3;  // corrupt the bookkeeping on purpose
        }
        ServerStep merged =
            server_step(server, deltas, ratio, compress_fn, num_workers);
        server = std::move(merged.state);
        UpdateStep update = apply_update(x, merged.delta, eta, wd, mu);
        x = std::move(update.x);
        wd = std::move(update.weight_decay);
        if (recurrence_applicable || record_step) {
          mean_grad = mean_of(grads);
          if (mu == 0.0) {
            mean_direction = mean_grad;
          } else {
            std::vector<ParamVector> dirs(num_workers);
            for (std::size_t i = 0; i < num_workers; ++i) {
              dirs[i].resize(dim);
              for (std::size_t j = 0; j < dim; ++j) {
                dirs[i][j] = mu * workers[i].momentum[j] + grads[i][j];
              }
            }
            mean_direction = mean_of(dirs);
          }
        }
        break;
      }
      case OptimizerKind::kEfSgd: {
        ParamVector corrected(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          corrected[i] = eta * grads[0][i] + single_error[i];
        }
        const ParamVector delta = compress_fn(corrected);
        for (std::size_t i = 0; i < dim; ++i) {
          x[i] -= delta[i];
          single_error[i] = corrected[i] - delta[i];
        }
        break;
      }
      case OptimizerKind::kFullPrecision: {
        FullPrecisionStep step = full_precision_step(workers, grads, mu);
        workers = std::move(step.states);
        UpdateStep update = apply_update(x, step.direction, eta, wd, mu);
        x = std::move(update.x);
        wd = std::move(update.weight_decay);
        break;
      }
      case OptimizerKind::kSignSgd:
      case OptimizerKind::kSignum: {
        VoteStep step = majority_vote_step(
            workers, grads, mu,
            /*use_momentum=*/config.optimizer == OptimizerKind::kSignum);
        workers = std::move(step.states);
        UpdateStep update = apply_update(x, step.direction, eta, wd, mu);
        x = std::move(update.x);
        wd = std::move(update.weight_decay);
        break;
      }
    }

    if (record_step) {
      pending.mean_grad = mean_grad;
      pending.mean_direction = mean_direction;
      result.trace.steps.push_back(std::move(pending));
    }

    if (recurrence_applicable) {
      predicted_xtilde.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        predicted_xtilde[i] = xtilde[i] - eta * mean_direction[i];
      }
      if (virtual_applicable) {
        predicted_z.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          predicted_z[i] = xtilde[i] -
                           virt_momentum_coeff * mean_momentum_prev[i] -
                           virt_grad_coeff * mean_grad[i];
        }
      }
      pred_scale = std::max(1.0, linf_norm(xtilde));
      have_prediction = true;
    }
  }

  result.final_x = x;
  result.final_loss = oracle->loss(x);
  result.final_grad_norm_sq = l2_norm_squared(oracle->exact_gradient(x));

  // Terminal state: the closing residual against x~_T and the trace record
  // at t = T.
  if (is_dist_ef && (recurrence_applicable || record_trace) && iterations > 0) {
    const double eta_prev = stepsize(config.schedule, iterations - 1);
    const ParamVector error_sum = mean_worker_errors_plus_server();
    max_error_norm_sq =
        std::max(max_error_norm_sq, l2_norm_squared(error_sum));
    ParamVector xtilde(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      xtilde[i] = x[i] - eta_prev * error_sum[i];
    }
    const ParamVector mean_momentum = mean_worker_momentum();
    if (recurrence_applicable && have_prediction) {
      const double scale =
          std::max(pred_scale, std::max(1.0, linf_norm(xtilde)));
      max_recurrence = std::max(
          max_recurrence, pair_residual(xtilde, predicted_xtilde, scale));
      if (virtual_applicable) {
        ParamVector z(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          z[i] = xtilde[i] - virt_momentum_coeff * mean_momentum[i];
        }
        const double zscale = std::max(pred_scale, std::max(1.0, linf_norm(z)));
        max_virtual =
            std::max(max_virtual, pair_residual(z, predicted_z, zscale));
      }
    }
    if (keep_in_trace(iterations)) {
      TraceStep terminal;
      terminal.t = iterations;
      terminal.eta = kNan;
      terminal.eta_prev = eta_prev;
      terminal.x = x;
      terminal.error_sum = error_sum;
      terminal.mean_momentum_prev = mean_momentum;
      result.trace.steps.push_back(std::move(terminal));
    }
  }

  // Sampled output-index metric.
  result.sampled_grad_norm_sq = kNan;
  if (iterations > 0) {
    std::vector<double> stepsizes(config.iterations);
    for (std::int64_t t = 0; t < iterations; ++t) {
      stepsizes[t] = stepsize(config.schedule, t);
    }
    try {
      const std::vector<double> weights =
          sample_output_index(stepsizes, result.smoothness);
      double acc = 0.0;
      for (std::size_t t = 0; t < weights.size(); ++t) {
        acc += weights[t] * result.metrics[t].grad_norm_sq;
      }
      result.sampled_grad_norm_sq = acc;
    } catch (const PreconditionError&) {
      // Some eta_t >= 3/(2L): the sampled metric is undefined for this run.
    }
  }

  result.total_bits_ideal = bits_ideal * config.iterations;
  result.total_bits_wire = bits_wire * config.iterations;

  VerificationReport& report = result.verification;
  report.enabled = config.verify;
  report.iterate_recurrence_residual = kNan;
  report.momentum_recurrence_residual = kNan;
  report.virtual_iterate_residual = kNan;
  report.delta_lower_bound = kNan;
  report.g_estimate = kNan;
  report.error_bound = kNan;
  report.error_bound_margin = kNan;
  if (recurrence_applicable) {
    if (mu == 0.0) report.iterate_recurrence_residual = max_recurrence;
    report.momentum_recurrence_residual = max_recurrence;
    if (virtual_applicable) report.virtual_iterate_residual = max_virtual;
    report.delta_lower_bound = delta_lower_bound(config.compressor);
    report.g_estimate = g_estimate;
    const double d2 = report.delta_lower_bound * report.delta_lower_bound;
    report.error_bound = 8.0 * (1.0 - report.delta_lower_bound) * g_estimate *
                         g_estimate / (d2 * (1.0 - mu) * (1.0 - mu)) *
                         (1.0 + 16.0 / d2);
    report.error_bound_margin = report.error_bound - max_error_norm_sq;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Metrics CSV
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace

void write_metrics_csv(std::ostream& out,
                       const std::vector<IterationMetrics>& metrics) {
  out << "t,loss,grad_norm_sq,error_norm_sq,stepsize,bits_ideal,bits_wire\n";
  for (const IterationMetrics& m : metrics) {
    out << m.t << ',' << format_double(m.loss) << ','
        << format_double(m.grad_norm_sq) << ','
        << format_double(m.error_norm_sq) << ',' << format_double(m.stepsize)
        << ',' << m.bits_ideal << ',' << m.bits_wire << '\n';
  }
}

std::vector<IterationMetrics> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValueError("metrics csv: missing header");
  }
  if (line.rfind("t,loss,", 0) != 0) {
    throw ValueError("metrics csv: unexpected header: " + line);
  }
  std::vector<IterationMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    IterationMetrics m;
    std::getline(ss, field, ',');
    m.t = std::stoll(field);
    std::getline(ss, field, ',');
    m.loss = std::stod(field);
    std::getline(ss, field, ',');
    m.grad_norm_sq = std::stod(field);
    std::getline(ss, field, ',');
    m.error_norm_sq = std::stod(field);
    std::getline(ss, field, ',');
    m.stepsize = std::stod(field);
    std::getline(ss, field, ',');
    m.bits_ideal = std::stoull(field);
    if (!std::getline(ss, field, ',')) {
      throw ValueError("metrics csv: truncated row");
    }
    m.bits_wire = std::stoull(field);
    rows.push_back(m);
  }
  return rows;
}

nlohmann::json make_run_summary(const RunConfig& config,
                                const RunResult& result) {
  nlohmann::json doc;
  doc["config"] = run_config_to_json(config);
  nlohmann::json final_section;
  final_section["iterations"] = config.iterations;
  final_section["loss"] = json_or_null(result.final_loss);
  final_section["grad_norm_sq"] = json_or_null(result.final_grad_norm_sq);
  final_section["sampled_grad_norm_sq"] =
      json_or_null(result.sampled_grad_norm_sq);
  final_section["total_bits_ideal"] = result.total_bits_ideal;
  final_section["total_bits_wire"] = result.total_bits_wire;
  doc["final"] = final_section;
  doc["smoothness"] = result.smoothness;
  if (result.verification.enabled) {
    doc["verification"] = to_json(result.verification);
  } else {
    doc["verification"] = nullptr;
  }
  const auto now = std::chrono::system_clock::now();
  const auto secs =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  doc["metadata"] = {{"unix_time", secs}};
  return doc;
}

}  // namespace distef
