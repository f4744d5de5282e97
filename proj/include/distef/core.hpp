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

#ifndef DISTEF_CORE_HPP_
#define DISTEF_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace distef {

// Flat dense vector of 64-bit reals. The whole pipeline computes in double;
// reduced-precision representations exist only at the wire boundary.
using ParamVector = std::vector<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct PartitionError : Error {
  using Error::Error;
};
struct ValueError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct WireFormatError : Error {
  using Error::Error;
};
struct DivergenceError : Error {
  DivergenceError(const std::string& what, std::int64_t t)
      : Error(what), iteration(t) {}
  std::int64_t iteration;
};

struct Norms {
  double l1 = 0.0;
  double l2_squared = 0.0;
};

// Returns (sum |v_i|, sum v_i^2) in one pass.
Norms norms(const ParamVector& v);

double dot(const ParamVector& a, const ParamVector& b);
double l2_norm_squared(const ParamVector& v);
double linf_norm(const ParamVector& v);

bool all_finite(const ParamVector& v);
void require_finite(const ParamVector& v, const char* what);
void require_same_dim(const ParamVector& a, const ParamVector& b,
                      const char* what);

// Sign mapped onto {-1, +1} with sign(0) = +1, so the 1-bit encoding is
// total over all inputs.
inline double sign_unit(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace distef

#endif  // DISTEF_CORE_HPP_
