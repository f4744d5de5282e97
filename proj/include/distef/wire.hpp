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

#ifndef DISTEF_WIRE_HPP_
#define DISTEF_WIRE_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "distef/core.hpp"
#include "distef/partition.hpp"

namespace distef {

// One compressed gradient message: per block a nonnegative float32 scale and
// d_b sign bits. The block partition is shared configuration and is not
// retransmitted. Byte layout (all little-endian):
//
//   u32 worker_id | u64 iteration | u32 block_count
//   per block: f32 scale | ceil(d_b / 8) sign bytes
//
// Sign bytes pack most-significant bit first, bit 1 = +1, bit 0 = -1, with
// zero padding in the final byte. See docs/wire_format.md.
struct CompressedMessage {
  struct Block {
    float scale = 0.0f;
    std::vector<bool> positive;  // one flag per element, true = +1

    friend bool operator==(const Block&, const Block&) = default;
  };

  std::uint32_t worker_id = 0;
  std::uint64_t iteration = 0;
  std::vector<Block> blocks;

  friend bool operator==(const CompressedMessage&,
                         const CompressedMessage&) = default;
};

inline constexpr std::size_t kWireHeaderBytes = 16;  // 4 + 8 + 4

// Exact encoded size for a message over this partition.
std::size_t encoded_size(const BlockPartition& partition);

std::vector<std::uint8_t> encode(const CompressedMessage& msg);

// Inverse of encode. Throws WireFormatError on any size mismatch, block
// count mismatch, or a scale that is negative or not finite.
CompressedMessage decode(const std::vector<std::uint8_t>& bytes,
                         const BlockPartition& partition);

// Per block scale * signs, widened to double.
ParamVector reconstruct(const CompressedMessage& msg,
                        const BlockPartition& partition);

// Blockwise scaled-sign front end: per-block scale ||v_b||_1 / d_b computed
// in double then stored as float32.
CompressedMessage make_message(std::uint32_t worker_id,
                               std::uint64_t iteration, const ParamVector& v,
                               const BlockPartition& partition);

// The compressor the simulator applies in wire mode: blockwise sign with a
// single-precision scale. Equals compress(blockwise_scaled_sign, v) up to
// the float32 rounding of each scale (relative error <= 2^-23); error
// feedback absorbs the difference because residuals are computed against
// this reconstructed value.
ParamVector wire_roundtrip_compress(const ParamVector& v,
                                    const BlockPartition& partition);

// Message files: each frame is a little-endian u64 byte length followed by
// the encoded message.
void write_frame(std::ostream& out, const std::vector<std::uint8_t>& bytes);
std::vector<std::vector<std::uint8_t>> read_frames(std::istream& in);

}  // namespace distef

#endif  // DISTEF_WIRE_HPP_
