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

#include "distef/optim.hpp"

#include <memory>
#include <string>
#include <utility>

namespace distef {

WorkerState WorkerState::init(std::size_t id, std::size_t dim) {
  WorkerState s;
  s.id = id;
  s.error.assign(dim, 0.0);
  s.momentum.assign(dim, 0.0);
  return s;
}

ServerState ServerState::init(std::size_t dim) {
  ServerState s;
  s.error.assign(dim, 0.0);
  return s;
}

DecoupledWeightDecay DecoupledWeightDecay::init(double lambda,
                                                std::size_t dim) {
  DecoupledWeightDecay s;
  s.lambda = lambda;
  s.momentum.assign(dim, 0.0);
  return s;
}

CompressFn make_compress_fn(const CompressorSpec& spec) {
  if (spec.kind == CompressorKind::kUnbiasedScaled) {
    // The rounding stream advances across calls; shared_ptr keeps the state
    // alive in the copied closure.
    auto rng = std::make_shared<Rng>(spec.rng_seed);
    return [spec, rng](const ParamVector& v) { return compress(spec, v, *rng); };
  }
  return [spec](const ParamVector& v) { return compress(spec, v); };
}

WorkerStep worker_step(const WorkerState& state, const ParamVector& grad,
                       double ratio, const CompressFn& compress_fn) {
  require_same_dim(grad, state.error, "worker_step");
  const std::size_t dim = grad.size();
  ParamVector corrected(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    corrected[i] = grad[i] + ratio * state.error[i];
  }
  WorkerStep out;
  out.delta = compress_fn(corrected);
  out.state = state;
  for (std::size_t i = 0; i < dim; ++i) {
    out.state.error[i] = corrected[i] - out.delta[i];
  }
  return out;
}

WorkerStep worker_step(const WorkerState& state, const ParamVector& grad,
                       double ratio, const CompressorSpec& spec) {
  return worker_step(state, grad, ratio, make_compress_fn(spec));
}

WorkerStep momentum_worker_step(const WorkerState& state,
                                const ParamVector& grad, double ratio,
                                double mu, const CompressFn& compress_fn) {
  require_same_dim(grad, state.error, "momentum_worker_step");
  const std::size_t dim = grad.size();
  WorkerStep out;
  out.state = state;
  ParamVector corrected(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.state.momentum[i] = mu * state.momentum[i] + grad[i];
    corrected[i] = mu * out.state.momentum[i] + grad[i] + ratio * state.error[i];
  }
  out.delta = compress_fn(corrected);
  for (std::size_t i = 0; i < dim; ++i) {
    out.state.error[i] = corrected[i] - out.delta[i];
  }
  return out;
}

WorkerStep momentum_worker_step(const WorkerState& state,
                                const ParamVector& grad, double ratio,
                                double mu, const CompressorSpec& spec) {
  return momentum_worker_step(state, grad, ratio, mu, make_compress_fn(spec));
}

ServerStep server_step(const ServerState& state,
                       const std::vector<ParamVector>& deltas, double ratio,
                       const CompressFn& compress_fn,
                       std::size_t expected_workers) {
  if (deltas.size() != expected_workers) {
    throw DimensionError("server_step: expected " +
                         std::to_string(expected_workers) +
                         " worker deltas, got " + std::to_string(deltas.size()));
  }
  const std::size_t dim = state.error.size();
  ParamVector merged(dim, 0.0);
  for (const ParamVector& delta : deltas) {  // fixed ascending worker order
    require_same_dim(delta, state.error, "server_step");
    for (std::size_t i = 0; i < dim; ++i) merged[i] += delta[i];
  }
  const double inv_m = 1.0 / static_cast<double>(deltas.size());
  for (std::size_t i = 0; i < dim; ++i) {
    merged[i] = merged[i] * inv_m + ratio * state.error[i];
  }
  ServerStep out;
  out.delta = compress_fn(merged);
  out.state = state;
  for (std::size_t i = 0; i < dim; ++i) {
    out.state.error[i] = merged[i] - out.delta[i];
  }
  return out;
}

ServerStep server_step(const ServerState& state,
                       const std::vector<ParamVector>& deltas, double ratio,
                       const CompressorSpec& spec,
                       std::size_t expected_workers) {
  return server_step(state, deltas, ratio, make_compress_fn(spec),
                     expected_workers);
}

UpdateStep apply_update(const ParamVector& x, const ParamVector& delta,
                        double eta, const DecoupledWeightDecay& wd,
                        double mu) {
  require_same_dim(x, delta, "apply_update");
  if (wd.lambda < 0.0) {
    throw ValueError("apply_update: weight decay must be nonnegative");
  }
  const std::size_t dim = x.size();
  UpdateStep out;
  out.x.resize(dim);
  out.weight_decay = wd;
  if (mu == 0.0) {
    for (std::size_t i = 0; i < dim; ++i) {
      out.x[i] = x[i] - eta * (delta[i] + wd.lambda * x[i]);
    }
    return out;
  }
  require_same_dim(x, wd.momentum, "apply_update");
  for (std::size_t i = 0; i < dim; ++i) {
    out.weight_decay.momentum[i] = mu * wd.momentum[i] + wd.lambda * x[i];
    out.x[i] =
        x[i] - eta * (delta[i] + mu * out.weight_decay.momentum[i] +
                      wd.lambda * x[i]);
  }
  return out;
}

EfSgdStep ef_sgd_step(const ParamVector& x, const ParamVector& error,
                      const ParamVector& grad, double eta,
                      const CompressorSpec& spec) {
  require_same_dim(x, grad, "ef_sgd_step");
  require_same_dim(x, error, "ef_sgd_step");
  const std::size_t dim = x.size();
  ParamVector corrected(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    corrected[i] = eta * grad[i] + error[i];
  }
  const ParamVector delta = compress(spec, corrected);
  EfSgdStep out;
  out.x.resize(dim);
  out.error.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.x[i] = x[i] - delta[i];
    out.error[i] = corrected[i] - delta[i];
  }
  return out;
}

VoteStep majority_vote_step(const std::vector<WorkerState>& states,
                            const std::vector<ParamVector>& grads, double mu,
                            bool use_momentum) {
  if (states.empty() || states.size() != grads.size()) {
    throw DimensionError("majority_vote_step: need one gradient per worker");
  }
  const std::size_t dim = grads[0].size();
  VoteStep out;
  out.states = states;
  ParamVector vote_sum(dim, 0.0);
  for (std::size_t w = 0; w < states.size(); ++w) {
    require_same_dim(grads[w], states[w].error, "majority_vote_step");
    if (use_momentum) {
      for (std::size_t i = 0; i < dim; ++i) {
        out.states[w].momentum[i] =
            mu * states[w].momentum[i] + (1.0 - mu) * grads[w][i];
        vote_sum[i] += sign_unit(out.states[w].momentum[i]);
      }
    } else {
      for (std::size_t i = 0; i < dim; ++i) {
        vote_sum[i] += sign_unit(grads[w][i]);
      }
    }
  }
  out.direction.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.direction[i] = sign_unit(vote_sum[i]);  // ties (sum 0) go to +1
  }
  return out;
}

FullPrecisionStep full_precision_step(const std::vector<WorkerState>& states,
                                      const std::vector<ParamVector>& grads,
                                      double mu) {
  if (states.empty() || states.size() != grads.size()) {
    throw DimensionError("full_precision_step: need one gradient per worker");
  }
  const std::size_t dim = grads[0].size();
  FullPrecisionStep out;
  out.states = states;
  ParamVector sum(dim, 0.0);
  for (std::size_t w = 0; w < states.size(); ++w) {
    require_same_dim(grads[w], states[w].momentum, "full_precision_step");
    for (std::size_t i = 0; i < dim; ++i) {
      out.states[w].momentum[i] = mu * states[w].momentum[i] + grads[w][i];
      sum[i] += mu * out.states[w].momentum[i] + grads[w][i];
    }
  }
  const double inv_m = 1.0 / static_cast<double>(states.size());
  out.direction.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) out.direction[i] = sum[i] * inv_m;
  return out;
}

}  // namespace distef
