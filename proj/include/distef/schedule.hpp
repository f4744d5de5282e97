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

#ifndef DISTEF_SCHEDULE_HPP_
#define DISTEF_SCHEDULE_HPP_

#include <cstddef>
#include <cstdint>

namespace distef {

enum class ScheduleKind {
  kConstant,
  kDecreasing,
  kIncreasing,
  // Increasing stepsize for the first `warmup` iterations, then the
  // decreasing formula re-anchored at t - warmup.
  kHybridWarmup,
};

const char* to_string(ScheduleKind kind);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kConstant;
  double gamma = 0.1;
  std::size_t horizon = 1;  // T; used by decreasing/increasing
  std::size_t workers = 1;  // M
  double delta = 1.0;       // compressor contraction lower bound
  std::size_t warmup = 0;   // hybrid_warmup only
};

void validate(const ScheduleSpec& sched);

// eta_t, with eta_{-1} = 0 by definition:
//   constant:    gamma
//   decreasing:  gamma / ( ((t+1) T)^{1/4} / sqrt(M)
//                          + ((1-delta) (1/delta^2 + 16/delta^4))^{1/3} T^{1/3} )
//   increasing:  gamma sqrt(t+1) / ( T / sqrt(M)
//                          + ((1-delta) (1/delta^2 + 16/delta^4))^{1/3} T^{5/6} )
double stepsize(const ScheduleSpec& sched, std::int64_t t);

// eta_{t-1} / eta_t; equals 0 at t = 0 since eta_{-1} = 0.
double stepsize_ratio(const ScheduleSpec& sched, std::int64_t t);

}  // namespace distef

#endif  // DISTEF_SCHEDULE_HPP_
