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

#include "distef/wire.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace distef {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::size_t sign_bytes(std::size_t count) { return (count + 7) / 8; }

}  // namespace

std::size_t encoded_size(const BlockPartition& partition) {
  std::size_t total = kWireHeaderBytes;
  for (const auto& block : partition.blocks()) {
    total += 4 + sign_bytes(block.size);
  }
  return total;
}

std::vector<std::uint8_t> encode(const CompressedMessage& msg) {
  std::vector<std::uint8_t> out;
  out.reserve(kWireHeaderBytes);
  put_u32(out, msg.worker_id);
  put_u64(out, msg.iteration);
  put_u32(out, static_cast<std::uint32_t>(msg.blocks.size()));
  for (const auto& block : msg.blocks) {
    if (block.positive.empty()) {
      throw WireFormatError("encode: empty sign block");
    }
    if (!(block.scale >= 0.0f) || !std::isfinite(block.scale)) {
      throw WireFormatError("encode: scale must be finite and nonnegative");
    }
    put_u32(out, std::bit_cast<std::uint32_t>(block.scale));
    // Most-significant bit first, 1 = +1; padding bits are zero.
    std::uint8_t byte = 0;
    int filled = 0;
    for (bool positive : block.positive) {
      byte = static_cast<std::uint8_t>((byte << 1) | (positive ? 1 : 0));
      if (++filled == 8) {
        out.push_back(byte);
        byte = 0;
        filled = 0;
      }
    }
    if (filled > 0) {
      byte = static_cast<std::uint8_t>(byte << (8 - filled));
      out.push_back(byte);
    }
  }
  return out;
}

CompressedMessage decode(const std::vector<std::uint8_t>& bytes,
                         const BlockPartition& partition) {
  const std::size_t expected = encoded_size(partition);
  if (bytes.size() != expected) {
    throw WireFormatError("decode: buffer is " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string(expected));
  }
  CompressedMessage msg;
  msg.worker_id = get_u32(bytes.data());
  msg.iteration = get_u64(bytes.data() + 4);
  const std::uint32_t block_count = get_u32(bytes.data() + 12);
  if (block_count != partition.num_blocks()) {
    throw WireFormatError("decode: block count " + std::to_string(block_count) +
                          " does not match partition (" +
                          std::to_string(partition.num_blocks()) + ")");
  }
  std::size_t pos = kWireHeaderBytes;
  msg.blocks.resize(block_count);
  for (std::size_t b = 0; b < block_count; ++b) {
    const float scale = std::bit_cast<float>(get_u32(bytes.data() + pos));
    pos += 4;
    if (!(scale >= 0.0f) || !std::isfinite(scale)) {
      throw WireFormatError("decode: invalid scale in block " +
                            std::to_string(b));
    }
    const std::size_t size = partition.block(b).size;
    msg.blocks[b].scale = scale;
    msg.blocks[b].positive.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      const std::uint8_t byte = bytes[pos + i / 8];
      const int shift = 7 - static_cast<int>(i % 8);
      msg.blocks[b].positive[i] = ((byte >> shift) & 1) != 0;
    }
    pos += sign_bytes(size);
  }
  return msg;
}

ParamVector reconstruct(const CompressedMessage& msg,
                        const BlockPartition& partition) {
  if (msg.blocks.size() != partition.num_blocks()) {
    throw WireFormatError("reconstruct: block count mismatch");
  }
  ParamVector out(partition.dim(), 0.0);
  for (std::size_t b = 0; b < msg.blocks.size(); ++b) {
    const auto& block = partition.block(b);
    const auto& payload = msg.blocks[b];
    if (payload.positive.size() != block.size) {
      throw WireFormatError("reconstruct: sign count mismatch in block " +
                            std::to_string(b));
    }
    const double scale = static_cast<double>(payload.scale);
    for (std::size_t i = 0; i < block.size; ++i) {
      out[block.offset + i] = payload.positive[i] ? scale : -scale;
    }
  }
  return out;
}

CompressedMessage make_message(std::uint32_t worker_id,
                               std::uint64_t iteration, const ParamVector& v,
                               const BlockPartition& partition) {
  if (partition.dim() != v.size()) {
    throw DimensionError("make_message: partition does not cover the vector");
  }
  CompressedMessage msg;
  msg.worker_id = worker_id;
  msg.iteration = iteration;
  msg.blocks.resize(partition.num_blocks());
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    const auto& block = partition.block(b);
    double l1 = 0.0;
    for (std::size_t i = block.offset; i < block.offset + block.size; ++i) {
      l1 += std::fabs(v[i]);
    }
    msg.blocks[b].scale =
        static_cast<float>(l1 / static_cast<double>(block.size));
    msg.blocks[b].positive.resize(block.size);
    for (std::size_t i = 0; i < block.size; ++i) {
      msg.blocks[b].positive[i] = !(v[block.offset + i] < 0.0);
    }
  }
  return msg;
}

ParamVector wire_roundtrip_compress(const ParamVector& v,
                                    const BlockPartition& partition) {
  return reconstruct(make_message(0, 0, v, partition), partition);
}

void write_frame(std::ostream& out, const std::vector<std::uint8_t>& bytes) {
  std::vector<std::uint8_t> prefix;
  put_u64(prefix, bytes.size());
  out.write(reinterpret_cast<const char*>(prefix.data()),
            static_cast<std::streamsize>(prefix.size()));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::vector<std::uint8_t>> read_frames(std::istream& in) {
  std::vector<std::vector<std::uint8_t>> frames;
  for (;;) {
    std::uint8_t prefix[8];
    in.read(reinterpret_cast<char*>(prefix), 8);
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != 8) throw WireFormatError("read_frames: torn prefix");
    const std::uint64_t len = get_u64(prefix);
    std::vector<std::uint8_t> frame(len);
    in.read(reinterpret_cast<char*>(frame.data()),
            static_cast<std::streamsize>(len));
    if (static_cast<std::uint64_t>(in.gcount()) != len) {
      throw WireFormatError("read_frames: truncated frame");
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace distef
