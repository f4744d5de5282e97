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

#ifndef DISTEF_HARNESS_HPP_
#define DISTEF_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "distef/config.hpp"
#include "distef/core.hpp"
#include "distef/schedule.hpp"

namespace distef {

// One CSV row per iteration. error_norm_sq is ||e~_t + (1/M) sum_i e_{t,i}||^2
// for the states entering iteration t (zero at t = 0).
struct IterationMetrics {
  std::int64_t t = 0;
  double loss = 0.0;
  double grad_norm_sq = 0.0;
  double error_norm_sq = 0.0;
  double stepsize = 0.0;
  std::uint64_t bits_ideal = 0;
  std::uint64_t bits_wire = 0;
};

// Per-iteration cost model, in bits, both directions:
//   full_precision -> 64 M d
//   majority_vote  -> 2 M d
//   dist_ef_block  -> 2 M d + 64 M B
enum class CommMethod { kFullPrecision, kMajorityVote, kDistEfBlock };

std::uint64_t comm_cost(CommMethod method, std::uint64_t workers,
                        std::uint64_t dim, std::uint64_t blocks);

// The cost-model row a run is accounted under, and the bits it actually puts
// on the wire. Runs without a defined codec (full precision, majority vote,
// top-k and unbiased compressors, which are simulated at full precision)
// report bits_wire == bits_ideal.
CommMethod comm_method_for(const RunConfig& config);
std::uint64_t bits_ideal_per_iteration(const RunConfig& config);
std::uint64_t bits_wire_per_iteration(const RunConfig& config);

// Output-index distribution P(o = k) proportional to eta_k (3 - 2 L eta_k).
// Requires 0 < eta_t < 3 / (2L) for every t.
std::vector<double> sample_output_index(const std::vector<double>& stepsizes,
                                        double smoothness);

// Retained run states for the recurrence checks. Steps appear in ascending t
// with a terminal record at t = T carrying only (x, error_sum,
// mean_momentum_prev, eta_prev). When d * (T + 1) exceeds kTraceElementLimit
// only a strided subsample of adjacent step pairs is retained.
struct TraceStep {
  std::int64_t t = 0;
  double eta = 0.0;
  double eta_prev = 0.0;
  ParamVector x;
  ParamVector error_sum;           // e~_t + (1/M) sum_i e_{t,i}
  ParamVector mean_grad;           // (1/M) sum_i g_{t,i}
  ParamVector mean_direction;      // (1/M) sum_i (mu m_{t,i} + g_{t,i})
  ParamVector mean_momentum_prev;  // (1/M) sum_i m_{t-1,i}
};

struct Trace {
  double mu = 0.0;
  double weight_decay = 0.0;
  ScheduleSpec schedule;
  std::vector<TraceStep> steps;
};

inline constexpr std::size_t kTraceElementLimit = 10'000'000;
inline constexpr double kRecurrenceTolerance = 1e-9;

// Error-corrected iterate of a step: x~_t = x_t - eta_{t-1} * error_sum_t.
ParamVector error_corrected_iterate(const TraceStep& step);

// Max over adjacent pairs of || x~_{t+1} - (x~_t - eta_t * mean_grad_t) ||_inf,
// relative to max(1, ||x~_t||_inf, ||x~_{t+1}||_inf). Valid for mu = 0,
// lambda = 0 runs.
double check_iterate_recurrence(const Trace& trace);

// Same recurrence with the momentum direction mean_i (mu m_{t,i} + g_{t,i}).
double check_momentum_recurrence(const Trace& trace);

// Virtual iterate z_t = x~_t - (eta mu^2 / (1 - mu)) * mean_momentum_prev_t;
// checks z_{t+1} = z_t - (eta / (1 - mu)) * mean_grad_t. Constant-stepsize
// runs only.
double check_virtual_iterate(const Trace& trace);

struct ErrorBoundCheck {
  double bound = 0.0;
  double max_observed = 0.0;
  double margin = 0.0;  // bound - max_observed
};

// Bound 8 (1-delta) G^2 / (delta^2 (1-mu)^2) * [1 + 16/delta^2] against the
// observed ||e~_t + mean_i e_{t,i}||^2. This is an empirical per-trajectory
// check of a statement about expectations; reports label it as such.
ErrorBoundCheck check_error_bound(const Trace& trace, double delta_lb,
                                  double mu, double g_estimate);

struct VerificationReport {
  bool enabled = false;
  double tolerance = kRecurrenceTolerance;
  // NaN marks a check that does not apply to the run.
  double iterate_recurrence_residual = 0.0;
  double momentum_recurrence_residual = 0.0;
  double virtual_iterate_residual = 0.0;
  double delta_lower_bound = 0.0;
  double g_estimate = 0.0;
  double error_bound = 0.0;
  double error_bound_margin = 0.0;

  bool recurrence_ok() const;
  bool error_bound_ok() const;
  bool passed() const { return recurrence_ok() && error_bound_ok(); }
};

nlohmann::json to_json(const VerificationReport& report);

struct RunResult {
  std::vector<IterationMetrics> metrics;
  ParamVector final_x;
  double final_loss = 0.0;
  double final_grad_norm_sq = 0.0;
  // Weighted by sample_output_index; NaN when some eta_t >= 3/(2L).
  double sampled_grad_norm_sq = 0.0;
  double smoothness = 0.0;
  std::uint64_t total_bits_ideal = 0;
  std::uint64_t total_bits_wire = 0;
  VerificationReport verification;
  Trace trace;  // populated only when config.verify
};

// Runs T iterations of the configured optimizer. Throws DivergenceError when
// the loss or ||x||_inf exceeds kDivergenceLimit.
RunResult run_experiment(const RunConfig& config);

inline constexpr double kDivergenceLimit = 1e12;

void write_metrics_csv(std::ostream& out,
                       const std::vector<IterationMetrics>& metrics);
std::vector<IterationMetrics> read_metrics_csv(std::istream& in);

nlohmann::json make_run_summary(const RunConfig& config,
                                const RunResult& result);

}  // namespace distef

#endif  // DISTEF_HARNESS_HPP_
