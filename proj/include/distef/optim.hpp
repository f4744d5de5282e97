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

#ifndef DISTEF_OPTIM_HPP_
#define DISTEF_OPTIM_HPP_

#include <cstddef>
#include <functional>
#include <vector>

#include "distef/compressor.hpp"
#include "distef/core.hpp"

namespace distef {

// Per-worker mutable record: accumulated compression error e and momentum m.
// Both start at zero.
struct WorkerState {
  std::size_t id = 0;
  ParamVector error;
  ParamVector momentum;

  static WorkerState init(std::size_t id, std::size_t dim);
};

// Server-side accumulated compression error.
struct ServerState {
  ParamVector error;

  static ServerState init(std::size_t dim);
};

// Decoupled weight decay with its own momentum; the decay term never enters
// the compression path.
struct DecoupledWeightDecay {
  double lambda = 0.0;
  ParamVector momentum;

  static DecoupledWeightDecay init(double lambda, std::size_t dim);
};

// Step functions are pure: (state, inputs) -> (outputs, new state). Worker
// steps may run in parallel; determinism comes from the fixed ascending-id
// aggregation order in server_step.
using CompressFn = std::function<ParamVector(const ParamVector&)>;

CompressFn make_compress_fn(const CompressorSpec& spec);

struct WorkerStep {
  ParamVector delta;
  WorkerState state;
};

// p = g + ratio * e;  delta = C(p);  e' = p - delta.
WorkerStep worker_step(const WorkerState& state, const ParamVector& grad,
                       double ratio, const CompressFn& compress_fn);
WorkerStep worker_step(const WorkerState& state, const ParamVector& grad,
                       double ratio, const CompressorSpec& spec);

// m' = mu m + g;  p = mu m' + g + ratio * e;  delta = C(p);  e' = p - delta.
// With mu = 0 this is bitwise identical to worker_step.
WorkerStep momentum_worker_step(const WorkerState& state,
                                const ParamVector& grad, double ratio,
                                double mu, const CompressFn& compress_fn);
WorkerStep momentum_worker_step(const WorkerState& state,
                                const ParamVector& grad, double ratio,
                                double mu, const CompressorSpec& spec);

struct ServerStep {
  ParamVector delta;
  ServerState state;
};

// p~ = mean(deltas) + ratio * e~;  delta~ = C(p~);  e~' = p~ - delta~.
// Deltas are summed in ascending worker order, then divided by M once.
ServerStep server_step(const ServerState& state,
                       const std::vector<ParamVector>& deltas, double ratio,
                       const CompressFn& compress_fn,
                       std::size_t expected_workers);
ServerStep server_step(const ServerState& state,
                       const std::vector<ParamVector>& deltas, double ratio,
                       const CompressorSpec& spec,
                       std::size_t expected_workers);

struct UpdateStep {
  ParamVector x;
  DecoupledWeightDecay weight_decay;
};

// mu = 0:  x' = x - eta (delta + lambda x).
// mu > 0:  m~' = mu m~ + lambda x;  x' = x - eta (delta + mu m~' + lambda x).
UpdateStep apply_update(const ParamVector& x, const ParamVector& delta,
                        double eta, const DecoupledWeightDecay& wd, double mu);

struct EfSgdStep {
  ParamVector x;
  ParamVector error;
};

// Single-machine step: p = eta g + e;  delta = C(p);  x' = x - delta;
// e' = p - delta. Note the stepsize multiplies g before compression.
EfSgdStep ef_sgd_step(const ParamVector& x, const ParamVector& error,
                      const ParamVector& grad, double eta,
                      const CompressorSpec& spec);

struct VoteStep {
  ParamVector direction;  // every coordinate in {-1, +1}
  std::vector<WorkerState> states;
};

// Majority vote: each worker sends s_i = sign(g_i), or with use_momentum
// s_i = sign(m'_i) where m'_i = mu m_i + (1 - mu) g_i; the server returns
// sign(sum_i s_i). Ties break to +1. The caller applies x' = x - eta * dir.
VoteStep majority_vote_step(const std::vector<WorkerState>& states,
                            const std::vector<ParamVector>& grads, double mu,
                            bool use_momentum);

struct FullPrecisionStep {
  ParamVector direction;
  std::vector<WorkerState> states;
};

// m'_i = mu m_i + g_i;  direction = (1/M) sum_i (mu m'_i + g_i).
// mu = 0 gives plain distributed SGD.
FullPrecisionStep full_precision_step(const std::vector<WorkerState>& states,
                                      const std::vector<ParamVector>& grads,
                                      double mu);

}  // namespace distef

#endif  // DISTEF_OPTIM_HPP_
