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

#ifndef DISTEF_PARTITION_HPP_
#define DISTEF_PARTITION_HPP_

#include <cstddef>
#include <vector>

namespace distef {

// Ordered, contiguous, disjoint index ranges covering {0, ..., dim-1}.
// Blocks are always contiguous after flattening (per-tensor blocks reduce to
// this form); arbitrary index sets are out of scope.
class BlockPartition {
 public:
  struct Block {
    std::size_t offset = 0;
    std::size_t size = 0;
    friend bool operator==(const Block&, const Block&) = default;
  };

  BlockPartition() = default;

  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return blocks_.empty(); }
  const Block& block(std::size_t b) const { return blocks_[b]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::vector<std::size_t> sizes() const;
  std::size_t min_block_size() const;
  std::size_t max_block_size() const;

  friend bool operator==(const BlockPartition&, const BlockPartition&) =
      default;

  static BlockPartition single(std::size_t dim);
  // dim split into num_blocks contiguous blocks whose sizes differ by at
  // most one (leading blocks take the remainder).
  static BlockPartition equal_split(std::size_t dim, std::size_t num_blocks);

 private:
  friend BlockPartition make_partition(const std::vector<std::size_t>& sizes);
  std::vector<Block> blocks_;
  std::size_t dim_ = 0;
};

// Builds the contiguous partition with the given block sizes; offsets are the
// prefix sums. Throws PartitionError on an empty list or a zero size.
BlockPartition make_partition(const std::vector<std::size_t>& sizes);

}  // namespace distef

#endif  // DISTEF_PARTITION_HPP_
