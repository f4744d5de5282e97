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

#include "distef/partition.hpp"

#include <algorithm>
#include <string>

#include "distef/core.hpp"

namespace distef {

std::vector<std::size_t> BlockPartition::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(blocks_.size());
  for (const Block& b : blocks_) out.push_back(b.size);
  return out;
}

std::size_t BlockPartition::min_block_size() const {
  std::size_t m = 0;
  for (const Block& b : blocks_) m = m == 0 ? b.size : std::min(m, b.size);
  return m;
}

std::size_t BlockPartition::max_block_size() const {
  std::size_t m = 0;
  for (const Block& b : blocks_) m = std::max(m, b.size);
  return m;
}

BlockPartition BlockPartition::single(std::size_t dim) {
  return make_partition({dim});
}

BlockPartition BlockPartition::equal_split(std::size_t dim,
                                           std::size_t num_blocks) {
  if (num_blocks == 0 || num_blocks > dim) {
    throw PartitionError("equal_split: need 1 <= blocks <= dim, got " +
                         std::to_string(num_blocks) + " blocks for dim " +
                         std::to_string(dim));
  }
  const std::size_t base = dim / num_blocks;
  const std::size_t rem = dim % num_blocks;
  std::vector<std::size_t> sizes(num_blocks, base);
  for (std::size_t b = 0; b < rem; ++b) sizes[b] += 1;
  return make_partition(sizes);
}

BlockPartition make_partition(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) {
    throw PartitionError("make_partition: empty size list");
  }
  BlockPartition p;
  p.blocks_.reserve(sizes.size());
  std::size_t offset = 0;
  for (std::size_t s : sizes) {
    if (s == 0) {
      throw PartitionError("make_partition: zero-sized block");
    }
    p.blocks_.push_back({offset, s});
    offset += s;
  }
  p.dim_ = offset;
  return p;
}

}  // namespace distef
