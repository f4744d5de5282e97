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

#include "distef/core.hpp"

#include <cmath>

namespace distef {

Norms norms(const ParamVector& v) {
  Norms out;
  for (double x : v) {
    out.l1 += std::fabs(x);
    out.l2_squared += x * x;
  }
  return out;
}

double dot(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm_squared(const ParamVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double linf_norm(const ParamVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool all_finite(const ParamVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_finite(const ParamVector& v, const char* what) {
  if (!all_finite(v)) {
    throw ValueError(std::string(what) + ": non-finite element");
  }
}

void require_same_dim(const ParamVector& a, const ParamVector& b,
                      const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

}  // namespace distef
