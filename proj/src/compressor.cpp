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

#include "distef/compressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace distef {

const char* to_string(CompressorKind kind) {
  switch (kind) {
    case CompressorKind::kIdentity:
      return "identity";
    case CompressorKind::kScaledSign:
      return "scaled_sign";
    case CompressorKind::kBlockwiseScaledSign:
      return "blockwise_scaled_sign";
    case CompressorKind::kTopK:
      return "top_k";
    case CompressorKind::kUnbiasedScaled:
      return "unbiased_scaled";
  }
  return "unknown";
}

CompressorSpec CompressorSpec::identity(std::size_t dim) {
  CompressorSpec spec;
  spec.kind = CompressorKind::kIdentity;
  spec.dim = dim;
  return spec;
}

CompressorSpec CompressorSpec::scaled_sign(std::size_t dim) {
  CompressorSpec spec;
  spec.kind = CompressorKind::kScaledSign;
  spec.dim = dim;
  return spec;
}

CompressorSpec CompressorSpec::blockwise_scaled_sign(BlockPartition partition) {
  CompressorSpec spec;
  spec.kind = CompressorKind::kBlockwiseScaledSign;
  spec.dim = partition.dim();
  spec.partition = std::move(partition);
  return spec;
}

CompressorSpec CompressorSpec::top_k(std::size_t dim, std::size_t k) {
  CompressorSpec spec;
  spec.kind = CompressorKind::kTopK;
  spec.dim = dim;
  spec.k = k;
  return spec;
}

CompressorSpec CompressorSpec::unbiased_scaled(std::size_t dim, double c,
                                               std::uint64_t rng_seed) {
  CompressorSpec spec;
  spec.kind = CompressorKind::kUnbiasedScaled;
  spec.dim = dim;
  spec.c = c;
  spec.rng_seed = rng_seed;
  return spec;
}

void validate(const CompressorSpec& spec) {
  if (spec.dim == 0) {
    throw ValueError("compressor: dimension must be positive");
  }
  switch (spec.kind) {
    case CompressorKind::kIdentity:
    case CompressorKind::kScaledSign:
      break;
    case CompressorKind::kBlockwiseScaledSign:
      if (spec.partition.empty() || spec.partition.dim() != spec.dim) {
        throw PartitionError(
            "compressor: block partition must cover the full dimension");
      }
      break;
    case CompressorKind::kTopK:
      if (spec.k < 1 || spec.k > spec.dim) {
        throw ValueError("compressor: top_k requires 1 <= k <= dim, got k=" +
                         std::to_string(spec.k));
      }
      break;
    case CompressorKind::kUnbiasedScaled:
      // The stochastic-rounding construction satisfies the expected
      // contraction E||cU(v) - v||^2 <= (1 - c)||v||^2 exactly when
      // c <= 1/dim (equality at c = 1/dim).
      if (!(spec.c > 0.0) || !(spec.c < 1.0)) {
        throw ValueError("compressor: unbiased_scaled requires c in (0, 1)");
      }
      if (spec.c > 1.0 / static_cast<double>(spec.dim)) {
        throw ValueError(
            "compressor: unbiased_scaled requires c <= 1/dim for the "
            "contraction contract to hold");
      }
      break;
  }
}

double delta_lower_bound(const CompressorSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case CompressorKind::kIdentity:
      return 1.0;
    case CompressorKind::kScaledSign:
      return 1.0 / static_cast<double>(spec.dim);
    case CompressorKind::kBlockwiseScaledSign:
      // min_b 1/d_b: the largest block gives the weakest guarantee.
      return 1.0 / static_cast<double>(spec.partition.max_block_size());
    case CompressorKind::kTopK:
      return static_cast<double>(spec.k) / static_cast<double>(spec.dim);
    case CompressorKind::kUnbiasedScaled:
      return spec.c;
  }
  return 1.0;
}

namespace {

void scaled_sign_block(const ParamVector& v, std::size_t offset,
                       std::size_t size, ParamVector* out) {
  double l1 = 0.0;
  for (std::size_t i = offset; i < offset + size; ++i) l1 += std::fabs(v[i]);
  const double scale = l1 / static_cast<double>(size);
  for (std::size_t i = offset; i < offset + size; ++i) {
    (*out)[i] = scale * sign_unit(v[i]);
  }
}

ParamVector top_k_compress(const CompressorSpec& spec, const ParamVector& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  // Equal magnitudes keep the lowest index.
  std::partial_sort(order.begin(), order.begin() + spec.k, order.end(),
                    [&v](std::size_t a, std::size_t b) {
                      const double fa = std::fabs(v[a]);
                      const double fb = std::fabs(v[b]);
                      if (fa != fb) return fa > fb;
                      return a < b;
                    });
  ParamVector out(v.size(), 0.0);
  for (std::size_t j = 0; j < spec.k; ++j) out[order[j]] = v[order[j]];
  return out;
}

ParamVector unbiased_scaled_compress(const CompressorSpec& spec,
                                     const ParamVector& v, Rng& rng) {
  const double s = std::sqrt(l2_norm_squared(v));
  ParamVector out(v.size(), 0.0);
  if (s == 0.0) return out;
  // Stochastic rounding onto {-s, +s} with P(+s) = (1 + v_i/s)/2, so
  // E[U(v)_i] = v_i; the output is c * U(v).
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p_plus = 0.5 * (1.0 + v[i] / s);
    const double u = rng.uniform();
    out[i] = spec.c * (u < p_plus ? s : -s);
  }
  return out;
}

}  // namespace

ParamVector compress(const CompressorSpec& spec, const ParamVector& v) {
  if (spec.kind == CompressorKind::kUnbiasedScaled) {
    throw PreconditionError(
        "compress: unbiased_scaled needs explicit RNG state");
  }
  Rng unused(0);
  return compress(spec, v, unused);
}

ParamVector compress(const CompressorSpec& spec, const ParamVector& v,
                     Rng& rng) {
  validate(spec);
  if (v.size() != spec.dim) {
    throw DimensionError("compress: input length " + std::to_string(v.size()) +
                         " does not match spec dimension " +
                         std::to_string(spec.dim));
  }
  switch (spec.kind) {
    case CompressorKind::kIdentity:
      return v;
    case CompressorKind::kScaledSign: {
      ParamVector out(v.size());
      scaled_sign_block(v, 0, v.size(), &out);
      return out;
    }
    case CompressorKind::kBlockwiseScaledSign: {
      ParamVector out(v.size());
      for (const auto& block : spec.partition.blocks()) {
        scaled_sign_block(v, block.offset, block.size, &out);
      }
      return out;
    }
    case CompressorKind::kTopK:
      return top_k_compress(spec, v);
    case CompressorKind::kUnbiasedScaled:
      return unbiased_scaled_compress(spec, v, rng);
  }
  return v;
}

double phi(const ParamVector& v, const BlockPartition& partition) {
  if (partition.dim() != v.size()) {
    throw DimensionError("phi: partition does not cover the vector");
  }
  double min_ratio = 1.0;
  bool any_nonzero = false;
  for (const auto& block : partition.blocks()) {
    double l1 = 0.0;
    double l2sq = 0.0;
    for (std::size_t i = block.offset; i < block.offset + block.size; ++i) {
      l1 += std::fabs(v[i]);
      l2sq += v[i] * v[i];
    }
    if (l2sq == 0.0) continue;  // zero block: no compression error
    const double ratio = l1 * l1 / (static_cast<double>(block.size) * l2sq);
    min_ratio = any_nonzero ? std::min(min_ratio, ratio) : ratio;
    any_nonzero = true;
  }
  return any_nonzero ? min_ratio : 1.0;
}

double empirical_delta(const CompressorSpec& spec, const ParamVector& v) {
  if (spec.kind == CompressorKind::kUnbiasedScaled) {
    throw PreconditionError(
        "empirical_delta: unbiased_scaled needs explicit RNG state");
  }
  Rng unused(0);
  return empirical_delta(spec, v, unused);
}

double empirical_delta(const CompressorSpec& spec, const ParamVector& v,
                       Rng& rng) {
  const double denom = l2_norm_squared(v);
  if (denom == 0.0) {
    throw ValueError("empirical_delta: undefined for the zero vector");
  }
  const ParamVector compressed = compress(spec, v, rng);
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double diff = compressed[i] - v[i];
    err += diff * diff;
  }
  return 1.0 - err / denom;
}

std::vector<std::optional<double>> coefficient_of_variation(
    const ParamVector& v, const BlockPartition& partition) {
  if (partition.dim() != v.size()) {
    throw DimensionError(
        "coefficient_of_variation: partition does not cover the vector");
  }
  std::vector<std::optional<double>> out;
  out.reserve(partition.num_blocks());
  for (const auto& block : partition.blocks()) {
    double mean = 0.0;
    for (std::size_t i = block.offset; i < block.offset + block.size; ++i) {
      mean += std::fabs(v[i]);
    }
    mean /= static_cast<double>(block.size);
    if (mean == 0.0) {
      out.push_back(std::nullopt);
      continue;
    }
    double var = 0.0;
    for (std::size_t i = block.offset; i < block.offset + block.size; ++i) {
      const double dev = std::fabs(v[i]) - mean;
      var += dev * dev;
    }
    var /= static_cast<double>(block.size);  // population variance
    out.push_back(std::sqrt(var) / mean);
  }
  return out;
}

}  // namespace distef
