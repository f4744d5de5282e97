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

#include "distef/schedule.hpp"

#include <cmath>
#include <string>

#include "distef/core.hpp"

namespace distef {

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kConstant:
      return "constant";
    case ScheduleKind::kDecreasing:
      return "decreasing";
    case ScheduleKind::kIncreasing:
      return "increasing";
    case ScheduleKind::kHybridWarmup:
      return "hybrid_warmup";
  }
  return "unknown";
}

void validate(const ScheduleSpec& sched) {
  if (!(sched.gamma > 0.0)) {
    throw ConfigError("schedule: gamma must be positive");
  }
  if (sched.horizon == 0 || sched.workers == 0) {
    throw ConfigError("schedule: horizon and workers must be positive");
  }
  if (!(sched.delta > 0.0) || sched.delta > 1.0) {
    throw ConfigError("schedule: delta must lie in (0, 1]");
  }
}

namespace {

// ((1 - delta) (1/delta^2 + 16/delta^4))^{1/3}; zero at delta = 1.
double compression_term(double delta) {
  const double inv2 = 1.0 / (delta * delta);
  return std::cbrt((1.0 - delta) * (inv2 + 16.0 * inv2 * inv2));
}

double decreasing_stepsize(const ScheduleSpec& sched, std::int64_t t) {
  const double horizon = static_cast<double>(sched.horizon);
  const double denom =
      std::pow(static_cast<double>(t + 1) * horizon, 0.25) /
          std::sqrt(static_cast<double>(sched.workers)) +
      compression_term(sched.delta) * std::cbrt(horizon);
  return sched.gamma / denom;
}

double increasing_stepsize(const ScheduleSpec& sched, std::int64_t t) {
  const double horizon = static_cast<double>(sched.horizon);
  const double denom =
      horizon / std::sqrt(static_cast<double>(sched.workers)) +
      compression_term(sched.delta) * std::pow(horizon, 5.0 / 6.0);
  return sched.gamma * std::sqrt(static_cast<double>(t + 1)) / denom;
}

}  // namespace

double stepsize(const ScheduleSpec& sched, std::int64_t t) {
  if (t < 0) return 0.0;  // eta_{-1} = 0
  switch (sched.kind) {
    case ScheduleKind::kConstant:
      return sched.gamma;
    case ScheduleKind::kDecreasing:
      return decreasing_stepsize(sched, t);
    case ScheduleKind::kIncreasing:
      return increasing_stepsize(sched, t);
    case ScheduleKind::kHybridWarmup: {
      const std::int64_t warmup = static_cast<std::int64_t>(sched.warmup);
      if (t < warmup) return increasing_stepsize(sched, t);
      return decreasing_stepsize(sched, t - warmup);
    }
  }
  return sched.gamma;
}

double stepsize_ratio(const ScheduleSpec& sched, std::int64_t t) {
  if (t < 0) {
    throw PreconditionError("stepsize_ratio: t must be >= 0");
  }
  if (t == 0) return 0.0;
  return stepsize(sched, t - 1) / stepsize(sched, t);
}

}  // namespace distef
