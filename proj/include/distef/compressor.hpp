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

#ifndef DISTEF_COMPRESSOR_HPP_
#define DISTEF_COMPRESSOR_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distef/core.hpp"
#include "distef/partition.hpp"
#include "distef/rng.hpp"

namespace distef {

// Contraction compressors: ||C(v) - v||_2^2 <= (1 - delta) ||v||_2^2 with
// delta in (0, 1]. The unbiased_scaled kind satisfies the contract in
// expectation only.
enum class CompressorKind {
  kIdentity,
  kScaledSign,           // (||v||_1 / d) * sign(v)
  kBlockwiseScaledSign,  // per block b: (||v_b||_1 / d_b) * sign(v_b)
  kTopK,                 // keep the k largest-magnitude entries
  kUnbiasedScaled,       // c * U(v), stochastic rounding onto {-s, +s}
};

const char* to_string(CompressorKind kind);

struct CompressorSpec {
  CompressorKind kind = CompressorKind::kIdentity;
  std::size_t dim = 0;
  std::size_t k = 0;            // top-k only
  BlockPartition partition;     // blockwise only
  double c = 0.0;               // unbiased_scaled only
  std::uint64_t rng_seed = 0;   // unbiased_scaled only

  static CompressorSpec identity(std::size_t dim);
  static CompressorSpec scaled_sign(std::size_t dim);
  static CompressorSpec blockwise_scaled_sign(BlockPartition partition);
  static CompressorSpec top_k(std::size_t dim, std::size_t k);
  static CompressorSpec unbiased_scaled(std::size_t dim, double c,
                                        std::uint64_t rng_seed);
};

void validate(const CompressorSpec& spec);

// v-independent lower bound on the contraction factor:
// identity -> 1, scaled_sign -> 1/d, blockwise -> min_b 1/d_b,
// top_k -> k/d, unbiased_scaled -> c.
double delta_lower_bound(const CompressorSpec& spec);

// Deterministic kinds only; throws PreconditionError for unbiased_scaled.
ParamVector compress(const CompressorSpec& spec, const ParamVector& v);
// All kinds; rng is consumed by unbiased_scaled only.
ParamVector compress(const CompressorSpec& spec, const ParamVector& v,
                     Rng& rng);

// Data-dependent contraction factor of the blockwise scaled-sign compressor:
// min over nonzero blocks of ||v_b||_1^2 / (d_b ||v_b||_2^2). Zero blocks
// contribute no compression error and are skipped; returns 1 if every block
// is zero.
double phi(const ParamVector& v, const BlockPartition& partition);

// 1 - ||C(v) - v||_2^2 / ||v||_2^2. Throws ValueError on a zero vector.
double empirical_delta(const CompressorSpec& spec, const ParamVector& v);
double empirical_delta(const CompressorSpec& spec, const ParamVector& v,
                       Rng& rng);

// Per block: population standard deviation of {|v_i|} divided by its mean.
// Blocks with zero mean magnitude have no defined value.
std::vector<std::optional<double>> coefficient_of_variation(
    const ParamVector& v, const BlockPartition& partition);

}  // namespace distef

#endif  // DISTEF_COMPRESSOR_HPP_
