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

#ifndef DISTEF_RNG_HPP_
#define DISTEF_RNG_HPP_

#include <cstdint>
#include <cstddef>

namespace distef {

std::uint64_t hash_u64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                       std::uint64_t d);

// splitmix64-based generator with explicit normal/uniform sampling, so runs
// are bit-reproducible regardless of the standard library's distribution
// implementations. Seeds are cheap to derive, which gives counter-style
// per-(seed, worker, iteration) streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; the second draw of each pair is cached.
  double normal();
  // Exponential with rate 1.
  double exponential();
  // Uniform index in {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Tags naming independent consumers of randomness. Derived stream seeds are
// hash mixes of (user seed, tag, ...), so no two consumers share draws.
namespace stream {
inline constexpr std::uint64_t kInitialPoint = 0x9aa2d1bd01f3a5e1ull;
inline constexpr std::uint64_t kGradientNoise = 0x6b79d29d2ca6f301ull;
inline constexpr std::uint64_t kMinibatch = 0x1357aa3b7e11c4d9ull;
inline constexpr std::uint64_t kDataset = 0xfe41ce55aad5a7a3ull;
inline constexpr std::uint64_t kTeacher = 0x8d0cc5c67c309b17ull;
inline constexpr std::uint64_t kCompressor = 0x24f1b00451c0de2bull;
}  // namespace stream

}  // namespace distef

#endif  // DISTEF_RNG_HPP_
