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
//
// End-to-end acceptance suite. Each numbered criterion prints one PASS/FAIL
// line; the binary exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "distef/cli.hpp"
#include "distef/compressor.hpp"
#include "distef/config.hpp"
#include "distef/harness.hpp"
#include "distef/optim.hpp"
#include "distef/problem.hpp"
#include "distef/rng.hpp"
#include "distef/wire.hpp"

using namespace distef;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::string sci(double v, int precision = 3) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(precision) << v;
  return ss.str();
}

std::string fixed(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

ParamVector random_vector(Rng& rng, std::size_t dim, int family) {
  ParamVector v(dim, 0.0);
  bool nonzero = false;
  for (std::size_t i = 0; i < dim; ++i) {
    switch (family) {
      case 0:
        v[i] = rng.normal();
        break;
      case 1:  // heavy-tailed
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

double error_sq(const ParamVector& compressed, const ParamVector& v) {
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double diff = compressed[i] - v[i];
    err += diff * diff;
  }
  return err;
}

// --------------------------------------------------------------------------
// 1. Compressor contract: per-draw contraction for the deterministic kinds,
//    in-expectation contraction for the randomized kind. < 10 s.
// --------------------------------------------------------------------------
Criterion criterion_1() {
  Criterion c{1, false, "", 0.0};
  Rng rng(101);
  const std::size_t dim = 64;
  const std::vector<CompressorSpec> specs = {
      CompressorSpec::identity(dim),
      CompressorSpec::scaled_sign(dim),
      CompressorSpec::blockwise_scaled_sign(make_partition({8, 16, 40})),
      CompressorSpec::top_k(dim, 16),
  };
  double max_excess = -std::numeric_limits<double>::infinity();
  for (const CompressorSpec& spec : specs) {
    const double delta = delta_lower_bound(spec);
    for (int draw = 0; draw < 10000; ++draw) {
      const ParamVector v = random_vector(rng, dim, draw % 3);
      const double budget = l2_norm_squared(v);
      const double excess =
          (error_sq(compress(spec, v), v) - (1.0 - delta) * budget) / budget;
      max_excess = std::max(max_excess, excess);
    }
  }
  // unbiased_scaled contracts in expectation only; check the mean over 10^4
  // draws per test vector against (1 - c) plus three standard errors.
  const CompressorSpec randomized =
      CompressorSpec::unbiased_scaled(dim, 1.0 / dim, 424242);
  Rng crng(randomized.rng_seed);
  double max_mean_excess = -std::numeric_limits<double>::infinity();
  for (int family = 0; family < 3; ++family) {
    const ParamVector v = random_vector(rng, dim, family);
    const double budget = l2_norm_squared(v);
    double mean = 0.0, m2 = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const double ratio = error_sq(compress(randomized, v, crng), v) / budget;
      const double d1 = ratio - mean;
      mean += d1 / (i + 1);
      m2 += d1 * (ratio - mean);
    }
    const double se = std::sqrt(m2 / (draws - 1) / draws);
    max_mean_excess =
        std::max(max_mean_excess, mean - (1.0 - randomized.c) - 3.0 * se);
  }
  c.pass = max_excess <= 1e-12 && max_mean_excess <= 0.0;
  c.detail = "max excess " + sci(max_excess) +
             " (tol 1e-12); randomized-kind mean excess " +
             sci(max_mean_excess) + " (in expectation)";
  return c;
}

// --------------------------------------------------------------------------
// 2. Blockwise compression-error identity and the geometric worked example.
// --------------------------------------------------------------------------
Criterion criterion_2() {
  Criterion c{2, false, "", 0.0};
  Rng rng(202);
  double max_rel = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::size_t> sizes(1 + rng.uniform_index(8));
    for (auto& s : sizes) s = 1 + rng.uniform_index(12);
    const BlockPartition partition = make_partition(sizes);
    const ParamVector v = random_vector(rng, partition.dim(), trial % 3);
    const double lhs = error_sq(
        compress(CompressorSpec::blockwise_scaled_sign(partition), v), v);
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
    max_rel = std::max(max_rel, std::fabs(lhs - rhs) / std::max(lhs, 1e-300));
  }

  // Geometric magnitude pattern: alpha = 0.5, B = 100 equal blocks.
  const double alpha = 0.5;
  const std::size_t blocks = 100;
  ParamVector v(blocks);
  double magnitude = 1.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    v[b] = magnitude * (b % 2 == 0 ? 1.0 : -1.0);
    magnitude /= alpha;
  }
  const BlockPartition partition =
      make_partition(std::vector<std::size_t>(blocks, 1));
  const double phi_value = phi(v, partition);
  const double measured =
      empirical_delta(CompressorSpec::scaled_sign(blocks), v);
  const double b_real = static_cast<double>(blocks);
  const double expected = (1.0 + alpha) * (1.0 - std::pow(alpha, b_real)) /
                          (b_real * (1.0 - alpha) *
                           (1.0 + std::pow(alpha, b_real)));
  const double formula_rel = std::fabs(measured - expected) / expected;

  c.pass = max_rel <= 1e-10 && phi_value == 1.0 && formula_rel <= 1e-9;
  c.detail = "identity defect " + sci(max_rel) + " (tol 1e-10); phi = " +
             fixed(phi_value, 1) + " exactly, non-block delta defect " +
             sci(formula_rel) + " (tol 1e-9)";
  return c;
}

RunConfig recurrence_config(std::uint64_t seed, double mu, CompressorKind kind,
                            ScheduleKind sched) {
  RunConfig config;
  config.seed = seed;
  config.workers = 4;
  config.iterations = 200;
  config.batch_size = 1;
  config.optimizer = OptimizerKind::kDistEf;
  config.momentum = mu;
  config.verify = true;
  config.problem.kind = ProblemKind::kQuadratic;
  config.problem.dim = 100;
  config.problem.condition_number = 10.0;
  config.problem.sigma = 1.0;
  config.problem.seed = mix_seed(seed, stream::kDataset);
  config.dim = 100;
  config.compressor = kind == CompressorKind::kScaledSign
                          ? CompressorSpec::scaled_sign(100)
                          : CompressorSpec::blockwise_scaled_sign(
                                BlockPartition::equal_split(100, 10));
  config.schedule.kind = sched;
  config.schedule.gamma =
      sched == ScheduleKind::kConstant ? 0.01 * (1.0 - mu) : 1.0;
  config.schedule.horizon = config.iterations;
  config.schedule.workers = config.workers;
  config.schedule.delta = delta_lower_bound(config.compressor);
  return config;
}

// --------------------------------------------------------------------------
// 3. Error-corrected iterate and virtual iterate recurrences over the
//    12-configuration grid. < 30 s.
// --------------------------------------------------------------------------
Criterion criterion_3(std::vector<RunResult>* kept_runs) {
  Criterion c{3, false, "", 0.0};
  double max_resid = 0.0;
  double max_virtual = 0.0;
  int configs = 0;
  for (CompressorKind kind :
       {CompressorKind::kScaledSign, CompressorKind::kBlockwiseScaledSign}) {
    for (double mu : {0.0, 0.9}) {
      for (ScheduleKind sched :
           {ScheduleKind::kConstant, ScheduleKind::kDecreasing,
            ScheduleKind::kIncreasing}) {
        const RunConfig config =
            recurrence_config(300 + configs, mu, kind, sched);
        const RunResult result = run_experiment(config);
        max_resid = std::max(max_resid, result.verification.momentum_recurrence_residual);
        if (mu == 0.0) {
          max_resid = std::max(max_resid, result.verification.iterate_recurrence_residual);
        }
        if (sched == ScheduleKind::kConstant) {
          max_virtual = std::max(
              max_virtual, result.verification.virtual_iterate_residual);
        }
        kept_runs->push_back(result);
        ++configs;
      }
    }
  }
  c.pass = configs == 12 && max_resid <= 1e-9 && max_virtual <= 1e-9;
  c.detail = "12 configs: max recurrence residual " + sci(max_resid) +
             ", max virtual-iterate residual " + sci(max_virtual) +
             " (tol 1e-9)";
  return c;
}

// --------------------------------------------------------------------------
// 4. Identity-compressor equivalence and the bitwise momentum-zero
//    reduction over 500 iterations.
// --------------------------------------------------------------------------
Criterion criterion_4() {
  Criterion c{4, false, "", 0.0};
  RunConfig ef;
  ef.seed = 404;
  ef.workers = 4;
  ef.iterations = 500;
  ef.batch_size = 1;
  ef.optimizer = OptimizerKind::kDistEf;
  ef.verify = true;
  ef.problem.kind = ProblemKind::kQuadratic;
  ef.problem.dim = 40;
  ef.problem.condition_number = 10.0;
  ef.problem.sigma = 1.0;
  ef.problem.seed = mix_seed(ef.seed, stream::kDataset);
  ef.dim = 40;
  ef.compressor = CompressorSpec::identity(40);
  ef.schedule = {ScheduleKind::kConstant, 0.02, 500, 4, 1.0, 0};
  RunConfig fp = ef;
  fp.optimizer = OptimizerKind::kFullPrecision;
  fp.verify = false;
  const RunResult a = run_experiment(ef);
  const RunResult b = run_experiment(fp);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < a.final_x.size(); ++i) {
    max_diff = std::max(max_diff, std::fabs(a.final_x[i] - b.final_x[i]));
  }
  for (std::size_t t = 0; t < a.metrics.size(); ++t) {
    max_diff =
        std::max(max_diff, std::fabs(a.metrics[t].loss - b.metrics[t].loss));
  }

  // Momentum-zero reduction: both worker-step variants, bitwise, with
  // states evolving over 500 iterations.
  Rng rng(405);
  const CompressorSpec spec = CompressorSpec::blockwise_scaled_sign(
      BlockPartition::equal_split(40, 8));
  WorkerState plain = WorkerState::init(0, 40);
  WorkerState with_momentum = WorkerState::init(0, 40);
  bool bitwise = true;
  for (int t = 0; t < 500 && bitwise; ++t) {
    ParamVector g(40);
    for (double& v : g) v = rng.normal();
    const double ratio = t == 0 ? 0.0 : 1.0;
    const WorkerStep s0 = worker_step(plain, g, ratio, spec);
    const WorkerStep s1 =
        momentum_worker_step(with_momentum, g, ratio, 0.0, spec);
    bitwise = std::memcmp(s0.delta.data(), s1.delta.data(),
                          40 * sizeof(double)) == 0 &&
              std::memcmp(s0.state.error.data(), s1.state.error.data(),
                          40 * sizeof(double)) == 0;
    plain = s0.state;
    with_momentum = s1.state;
  }

  c.pass = max_diff <= 1e-12 && bitwise;
  c.detail = "identity-vs-SGD max deviation " + sci(max_diff) +
             " (tol 1e-12); mu=0 step outputs " +
             (bitwise ? "bitwise equal over 500 iterations" : "DIFFER");
  return c;
}

// --------------------------------------------------------------------------
// 5. Error-norm bound margins on every verification run with a known
//    contraction bound.
// --------------------------------------------------------------------------
Criterion criterion_5(const std::vector<RunResult>& runs) {
  Criterion c{5, false, "", 0.0};
  double min_margin = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (const RunResult& result : runs) {
    if (std::isnan(result.verification.error_bound_margin)) continue;
    min_margin = std::min(min_margin, result.verification.error_bound_margin);
    ++checked;
  }
  // Add a top-k run and an identity run (bound exactly zero).
  RunConfig extra = recurrence_config(505, 0.9, CompressorKind::kScaledSign,
                                      ScheduleKind::kConstant);
  extra.compressor = CompressorSpec::top_k(100, 50);
  extra.schedule.delta = delta_lower_bound(extra.compressor);
  const RunResult topk = run_experiment(extra);
  min_margin = std::min(min_margin, topk.verification.error_bound_margin);
  ++checked;

  RunConfig ident = recurrence_config(506, 0.0, CompressorKind::kScaledSign,
                                      ScheduleKind::kConstant);
  ident.compressor = CompressorSpec::identity(100);
  ident.schedule.delta = 1.0;
  const RunResult ident_run = run_experiment(ident);
  const bool identity_exact = ident_run.verification.error_bound == 0.0 &&
                              ident_run.verification.error_bound_margin == 0.0;
  ++checked;

  c.pass = min_margin >= 0.0 && identity_exact;
  c.detail = std::to_string(checked) + " runs: min margin " + sci(min_margin) +
             "; identity bound and observed both exactly 0 "
             "(empirical per-trajectory check, empirical G)";
  return c;
}

// --------------------------------------------------------------------------
// 6. Communication accounting: cost-model rows, measured wire payload, and
//    the near-32x reduction ratio at M=7, d=1e6, B=100.
// --------------------------------------------------------------------------
Criterion criterion_6() {
  Criterion c{6, false, "", 0.0};
  const bool table_ok =
      comm_cost(CommMethod::kFullPrecision, 7, 1'000'000, 0) ==
          448'000'000ull &&
      comm_cost(CommMethod::kMajorityVote, 7, 1'000'000, 0) == 14'000'000ull &&
      comm_cost(CommMethod::kDistEfBlock, 7, 1'000'000, 100) == 14'044'800ull;

  // Measured payload for byte-aligned blocks: encode a real message.
  const BlockPartition aligned =
      make_partition(std::vector<std::size_t>(100, 8));
  Rng rng(606);
  ParamVector payload(aligned.dim());
  for (double& v : payload) v = rng.normal();
  const auto bytes = encode(make_message(3, 17, payload, aligned));
  const std::size_t measured_bits = 8 * bytes.size();
  const std::size_t expected_bits =
      aligned.dim() + 32 * aligned.num_blocks() + 8 * kWireHeaderBytes;
  const bool wire_ok = measured_bits == expected_bits;

  // Reduction ratio at the quoted configuration.
  const double full = static_cast<double>(
      comm_cost(CommMethod::kFullPrecision, 7, 1'000'000, 0));
  const double compressed = static_cast<double>(
      comm_cost(CommMethod::kDistEfBlock, 7, 1'000'000, 100));
  const double ratio = full / compressed;
  const bool ratio_ok = ratio >= 31.9;

  c.pass = table_ok && wire_ok && ratio_ok;
  c.detail = std::string("table rows ") + (table_ok ? "exact" : "WRONG") +
             "; measured payload " + std::to_string(measured_bits) +
             " bits = d + 32B + 128 header" + (wire_ok ? "" : " MISMATCH") +
             "; reduction ratio " + fixed(ratio) + " vs required 31.9" +
             (ratio_ok ? "" : " (448e6 / 14.0448e6 falls short of 31.9)");
  return c;
}

// --------------------------------------------------------------------------
// 7. Desk-scale convergence against full-precision SGD at the stepsize
//    tuned (once) for full-precision SGD. < 2 min.
// --------------------------------------------------------------------------
RunConfig desk_quadratic(std::uint64_t seed, double gamma, OptimizerKind opt) {
  RunConfig c;
  c.seed = seed;
  c.workers = 4;
  c.iterations = 2000;
  c.batch_size = 1;
  c.optimizer = opt;
  c.verify = false;
  c.problem.kind = ProblemKind::kQuadratic;
  c.problem.dim = 50;
  c.problem.condition_number = 20.0;
  c.problem.sigma = 1.0;
  c.problem.seed = mix_seed(seed, stream::kDataset);
  c.dim = 50;
  c.compressor = opt == OptimizerKind::kDistEf
                     ? CompressorSpec::blockwise_scaled_sign(
                           BlockPartition::equal_split(50, 10))
                     : CompressorSpec::identity(50);
  c.schedule = {ScheduleKind::kConstant, gamma, c.iterations, c.workers,
                delta_lower_bound(c.compressor), 0};
  return c;
}

RunConfig desk_logistic(std::uint64_t seed, double gamma, OptimizerKind opt) {
  RunConfig c;
  c.seed = seed;
  c.workers = 4;
  c.iterations = 1000;
  c.batch_size = 8;
  c.optimizer = opt;
  c.verify = false;
  c.problem.kind = ProblemKind::kLogistic;
  c.problem.dim = 20;
  c.problem.samples = 256;
  c.problem.seed = mix_seed(seed, stream::kDataset);
  c.dim = 20;
  c.compressor = opt == OptimizerKind::kDistEf
                     ? CompressorSpec::blockwise_scaled_sign(
                           BlockPartition::equal_split(20, 4))
                     : CompressorSpec::identity(20);
  c.schedule = {ScheduleKind::kConstant, gamma, c.iterations, c.workers,
                delta_lower_bound(c.compressor), 0};
  return c;
}

Criterion criterion_7() {
  Criterion c{7, false, "", 0.0};
  const int seeds = 20;

  // Quadratic: tune the constant stepsize once, on full-precision SGD, by
  // its own sampled-gradient metric over the grid below (every candidate
  // obeys eta < 3/(2L) = 0.075, so the sampled metric is defined).
  const std::vector<double> quad_grid = {0.01, 0.02, 0.03, 0.05, 0.06, 0.07};
  double best_quad_gamma = quad_grid.front();
  double best_quad_metric = std::numeric_limits<double>::infinity();
  for (double gamma : quad_grid) {
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
      mean += run_experiment(desk_quadratic(7000 + s, gamma,
                                            OptimizerKind::kFullPrecision))
                  .sampled_grad_norm_sq;
    }
    mean /= seeds;
    if (mean < best_quad_metric) {
      best_quad_metric = mean;
      best_quad_gamma = gamma;
    }
  }
  double ef_quad_metric = std::numeric_limits<double>::infinity();
  bool ef_quad_diverged = false;
  {
    double mean = 0.0;
    try {
      for (int s = 0; s < seeds; ++s) {
        mean += run_experiment(desk_quadratic(7000 + s, best_quad_gamma,
                                              OptimizerKind::kDistEf))
                    .sampled_grad_norm_sq;
      }
      ef_quad_metric = mean / seeds;
    } catch (const DivergenceError&) {
      ef_quad_diverged = true;
    }
  }
  const bool quad_ok =
      !ef_quad_diverged && ef_quad_metric <= 1.10 * best_quad_metric;

  // Logistic regression: same protocol on the final loss.
  const std::vector<double> logi_grid = {0.05, 0.1, 0.2, 0.5, 1.0};
  double best_logi_gamma = logi_grid.front();
  double best_logi_loss = std::numeric_limits<double>::infinity();
  for (double gamma : logi_grid) {
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
      mean += run_experiment(desk_logistic(7100 + s, gamma,
                                           OptimizerKind::kFullPrecision))
                  .final_loss;
    }
    mean /= seeds;
    if (mean < best_logi_loss) {
      best_logi_loss = mean;
      best_logi_gamma = gamma;
    }
  }
  double ef_logi_loss = 0.0;
  for (int s = 0; s < seeds; ++s) {
    ef_logi_loss += run_experiment(desk_logistic(7100 + s, best_logi_gamma,
                                                 OptimizerKind::kDistEf))
                        .final_loss;
  }
  ef_logi_loss /= seeds;
  const double logi_rel =
      std::fabs(ef_logi_loss - best_logi_loss) / best_logi_loss;
  const bool logi_ok = logi_rel <= 0.01;

  c.pass = quad_ok && logi_ok;
  std::ostringstream detail;
  detail << "quadratic (eta* " << best_quad_gamma << "): sgd "
         << fixed(best_quad_metric) << " vs ef ";
  if (ef_quad_diverged) {
    detail << "DIVERGED";
  } else {
    detail << fixed(ef_quad_metric) << " ("
           << fixed(100.0 * (ef_quad_metric / best_quad_metric - 1.0), 1)
           << "% off, allowed 10%)";
  }
  detail << "; logistic (eta* " << best_logi_gamma << "): loss gap "
         << fixed(100.0 * logi_rel, 3) << "% (allowed 1%)";
  c.detail = detail.str();
  return c;
}

// --------------------------------------------------------------------------
// 8. Variance reduction in the worker count.
// --------------------------------------------------------------------------
Criterion criterion_8() {
  Criterion c{8, false, "", 0.0};
  const int seeds = 20;
  std::vector<double> means;
  std::vector<double> half_widths;
  for (std::size_t workers : {1, 2, 4, 8}) {
    double mean = 0.0, m2 = 0.0;
    int n = 0;
    for (int s = 0; s < seeds; ++s) {
      RunConfig config;
      config.seed = 8000 + s;
      config.workers = workers;
      config.iterations = 400;
      config.batch_size = 1;
      config.optimizer = OptimizerKind::kDistEf;
      config.verify = false;
      config.problem.kind = ProblemKind::kQuadratic;
      config.problem.dim = 20;
      config.problem.condition_number = 10.0;
      config.problem.sigma = 1.0;
      config.problem.seed = mix_seed(config.seed, stream::kDataset);
      config.dim = 20;
      config.compressor = CompressorSpec::blockwise_scaled_sign(
          BlockPartition::equal_split(20, 4));
      config.schedule = {ScheduleKind::kConstant, 0.03, 400, workers,
                         delta_lower_bound(config.compressor), 0};
      const double final_grad_sq =
          run_experiment(config).metrics.back().grad_norm_sq;
      ++n;
      const double d1 = final_grad_sq - mean;
      mean += d1 / n;
      m2 += d1 * (final_grad_sq - mean);
    }
    means.push_back(mean);
    half_widths.push_back(1.96 * std::sqrt(m2 / (n - 1) / n));
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    const bool nonincreasing = means[i + 1] <= means[i];
    const bool overlap =
        means[i + 1] - half_widths[i + 1] <= means[i] + half_widths[i];
    ok = ok && (nonincreasing || overlap);
  }
  c.pass = ok;
  std::ostringstream detail;
  detail << "mean final ||grad||^2 over M in {1,2,4,8}: ";
  for (std::size_t i = 0; i < means.size(); ++i) {
    detail << fixed(means[i]) << (i + 1 < means.size() ? " -> " : "");
  }
  detail << " (95% CI overlap permitted)";
  c.detail = detail.str();
  return c;
}

// --------------------------------------------------------------------------
// 9. Analytic gradients vs central finite differences.
// --------------------------------------------------------------------------
Criterion criterion_9() {
  Criterion c{9, false, "", 0.0};
  const auto fd_worst = [](const GradOracle& oracle, Rng& rng) {
    double worst = 0.0;
    for (int point = 0; point < 5; ++point) {
      ParamVector x(oracle.dim());
      for (double& v : x) v = rng.normal();
      const ParamVector g = oracle.exact_gradient(x);
      const double scale = std::max(linf_norm(g), 1e-8);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::fabs(x[i]));
        ParamVector lo = x, hi = x;
        lo[i] -= h;
        hi[i] += h;
        const double fd = (oracle.loss(hi) - oracle.loss(lo)) / (2.0 * h);
        worst = std::max(worst, std::fabs(fd - g[i]) / scale);
      }
    }
    return worst;
  };
  Rng rng(909);
  const auto quadratic = make_quadratic(20, 5.0, 0.0, 91);
  const auto logistic = make_logistic(64, 10, 92);
  const auto mlp = make_mlp({4, 8, 2}, 32, 93);
  const double worst_q = fd_worst(*quadratic, rng);
  const double worst_l = fd_worst(*logistic, rng);
  const double worst_m = fd_worst(*mlp, rng);
  const double worst = std::max({worst_q, worst_l, worst_m});
  c.pass = worst <= 1e-5;
  c.detail = "max relative fd error: quadratic " + sci(worst_q) +
             ", logistic " + sci(worst_l) + ", mlp " + sci(worst_m) +
             " (tol 1e-5)";
  return c;
}

// --------------------------------------------------------------------------
// 10. Determinism: repeated runs produce byte-identical metric CSVs.
// --------------------------------------------------------------------------
Criterion criterion_10() {
  Criterion c{10, false, "", 0.0};
  const fs::path root = fs::temp_directory_path() / "distef_acceptance_det";
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json doc = nlohmann::json::parse(R"({
    "seed": 10, "workers": 4, "iterations": 120, "batch_size": 2,
    "optimizer": "dist_ef", "momentum": 0.9, "verify": true,
    "wire_mode": true,
    "compressor": {"kind": "blockwise_scaled_sign",
                   "partition": {"mode": "equal", "blocks": 6}},
    "schedule": {"kind": "decreasing", "gamma": 1.0},
    "problem": {"kind": "quadratic", "dim": 30,
                "condition_number": 8.0, "sigma": 1.0}
  })");
  const fs::path config_path = root / "config.json";
  std::ofstream(config_path) << doc.dump(2);
  std::ostringstream out, err;
  const int code_a =
      cli::cmd_run(config_path.string(), (root / "a").string(), {}, out, err);
  const int code_b =
      cli::cmd_run(config_path.string(), (root / "b").string(), {}, out, err);
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string bytes_a = slurp(root / "a" / "metrics.csv");
  const std::string bytes_b = slurp(root / "b" / "metrics.csv");
  c.pass =
      code_a == 0 && code_b == 0 && !bytes_a.empty() && bytes_a == bytes_b;
  c.detail = c.pass ? "two runs, metrics.csv byte-identical (" +
                          std::to_string(bytes_a.size()) + " bytes)"
                    : "metric files differ or runs failed";
  fs::remove_all(root);
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  std::vector<RunResult> recurrence_runs;

  const auto timed = [&results](int id, double budget_seconds,
                                const std::function<Criterion()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    c.id = id;
    c.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (budget_seconds > 0.0 && c.seconds >= budget_seconds) {
      c.pass = false;
      c.detail += " [over the " + fixed(budget_seconds, 0) + " s budget]";
    }
    results.push_back(c);
  };

  timed(1, 10.0, criterion_1);
  timed(2, 0.0, criterion_2);
  timed(3, 30.0, [&recurrence_runs] { return criterion_3(&recurrence_runs); });
  timed(4, 0.0, criterion_4);
  timed(5, 0.0, [&recurrence_runs] { return criterion_5(recurrence_runs); });
  timed(6, 0.0, criterion_6);
  timed(7, 120.0, criterion_7);
  timed(8, 0.0, criterion_8);
  timed(9, 0.0, criterion_9);
  timed(10, 0.0, criterion_10);

  static const char* kNames[] = {
      "compressor contract",
      "blockwise error identity + geometric example",
      "iterate recurrences (12 configs)",
      "identity equivalence + mu=0 reduction",
      "error-norm bound margins",
      "communication accounting",
      "desk-scale convergence vs full precision",
      "variance reduction in worker count",
      "gradient fidelity (finite differences)",
      "determinism (byte-identical CSVs)",
  };

  int failures = 0;
  for (const Criterion& c : results) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << ". "
              << kNames[c.id - 1] << ": " << c.detail << " ["
              << fixed(c.seconds, 2) << " s]\n";
    if (!c.pass) ++failures;
  }
  std::cout << results.size() - failures << "/" << results.size()
            << " acceptance criteria passed\n";
  return failures == 0 ? 0 : 1;
}
