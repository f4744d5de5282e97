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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <sstream>

#include "distef/compressor.hpp"
#include "distef/rng.hpp"
#include "distef/wire.hpp"

using namespace distef;

namespace {

CompressedMessage random_message(Rng& rng, const BlockPartition& partition) {
  CompressedMessage msg;
  msg.worker_id = static_cast<std::uint32_t>(rng.uniform_index(1u << 16));
  msg.iteration = rng.next_u64() >> 16;
  msg.blocks.resize(partition.num_blocks());
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    msg.blocks[b].scale = static_cast<float>(rng.uniform() * 100.0);
    msg.blocks[b].positive.resize(partition.block(b).size);
    for (std::size_t i = 0; i < partition.block(b).size; ++i) {
      msg.blocks[b].positive[i] = rng.uniform() < 0.5;
    }
  }
  return msg;
}

}  // namespace

TEST_CASE("sign packing is MSB-first with 1 = positive") {
  CompressedMessage msg;
  msg.worker_id = 3;
  msg.iteration = 9;
  msg.blocks.resize(1);
  msg.blocks[0].scale = 1.0f;
  msg.blocks[0].positive = {true, false, true, false, true, false, true, false};
  const auto bytes = encode(msg);
  REQUIRE(bytes.size() == kWireHeaderBytes + 4 + 1);
  CHECK(bytes[kWireHeaderBytes + 4] == 0xAA);
  // Header fields, little-endian.
  CHECK(bytes[0] == 3);
  CHECK(bytes[4] == 9);
  CHECK(bytes[12] == 1);
}

TEST_CASE("padding bits in the final byte are zero") {
  CompressedMessage msg;
  msg.blocks.resize(1);
  msg.blocks[0].scale = 2.0f;
  msg.blocks[0].positive = {true, true, true};  // 0b111 -> 0xE0 after padding
  const auto bytes = encode(msg);
  CHECK(bytes.back() == 0xE0);
}

TEST_CASE("payload size formula") {
  const BlockPartition aligned = make_partition({8, 16, 64, 8});
  // Byte-aligned blocks: d sign bits + 32 bits per block scale + header.
  CHECK(8 * encoded_size(aligned) ==
        aligned.dim() + 32 * aligned.num_blocks() + 8 * kWireHeaderBytes);
  const BlockPartition ragged = make_partition({3, 9});
  CHECK(encoded_size(ragged) == kWireHeaderBytes + (4 + 1) + (4 + 2));
}

TEST_CASE("round-trip on random messages") {
  Rng rng(314);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::size_t> sizes(1 + rng.uniform_index(4));
    for (auto& s : sizes) s = 1 + rng.uniform_index(20);
    const BlockPartition partition = make_partition(sizes);
    const CompressedMessage msg = random_message(rng, partition);
    const auto bytes = encode(msg);
    REQUIRE(bytes.size() == encoded_size(partition));
    REQUIRE(decode(bytes, partition) == msg);
  }
}

TEST_CASE("decode rejects malformed buffers") {
  const BlockPartition partition = make_partition({4, 4});
  Rng rng(21);
  const auto bytes = encode(random_message(rng, partition));

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode(truncated, partition), WireFormatError);

  auto oversized = bytes;
  oversized.push_back(0);
  CHECK_THROWS_AS(decode(oversized, partition), WireFormatError);

  // A negative scale is representable in the bit pattern but invalid.
  auto negative = bytes;
  negative[kWireHeaderBytes + 3] |= 0x80;  // set the f32 sign bit
  CHECK_THROWS_AS(decode(negative, partition), WireFormatError);

  // Block-count mismatch in the header.
  auto wrong_count = bytes;
  wrong_count[12] = 3;
  CHECK_THROWS_AS(decode(wrong_count, partition), WireFormatError);
}

TEST_CASE("encoder rejects invalid blocks") {
  CompressedMessage empty_block;
  empty_block.blocks.resize(1);
  empty_block.blocks[0].scale = 1.0f;
  CHECK_THROWS_AS(encode(empty_block), WireFormatError);

  CompressedMessage bad_scale;
  bad_scale.blocks.resize(1);
  bad_scale.blocks[0].scale = -1.0f;
  bad_scale.blocks[0].positive = {true};
  CHECK_THROWS_AS(encode(bad_scale), WireFormatError);
}

TEST_CASE("reconstruct hand examples") {
  const BlockPartition partition = make_partition({2});
  CompressedMessage msg;
  msg.blocks.resize(1);
  msg.blocks[0].scale = 2.0f;
  msg.blocks[0].positive = {true, false};
  CHECK(reconstruct(msg, partition) == ParamVector{2.0, -2.0});

  msg.blocks[0].scale = 0.0f;
  CHECK(reconstruct(msg, partition) == ParamVector{0.0, 0.0});
}

TEST_CASE("wire compressor matches the double-precision compressor up to f32") {
  Rng rng(55);
  const BlockPartition partition = make_partition({8, 24, 32});
  const CompressorSpec spec = CompressorSpec::blockwise_scaled_sign(partition);
  for (int trial = 0; trial < 300; ++trial) {
    ParamVector v(partition.dim());
    for (double& x : v) x = rng.normal() * std::exp(3.0 * rng.normal());
    const ParamVector exact = compress(spec, v);
    const ParamVector wired = wire_roundtrip_compress(v, partition);
    for (std::size_t i = 0; i < v.size(); ++i) {
      // Relative scale error bounded by float32 rounding.
      CHECK(std::fabs(wired[i] - exact[i]) <=
            std::fabs(exact[i]) * 0x1.0p-23 + 1e-300);
    }
  }
}

TEST_CASE("wire compressor still satisfies the contraction bound") {
  Rng rng(56);
  const BlockPartition partition = make_partition({4, 12, 16});
  const double delta =
      delta_lower_bound(CompressorSpec::blockwise_scaled_sign(partition));
  for (int trial = 0; trial < 2000; ++trial) {
    ParamVector v(partition.dim());
    for (double& x : v) x = rng.normal();
    const ParamVector c = wire_roundtrip_compress(v, partition);
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      err += (c[i] - v[i]) * (c[i] - v[i]);
    }
    const double budget = l2_norm_squared(v);
    CHECK(err <= (1.0 - delta) * budget + 1e-12 * budget);
  }
}

TEST_CASE("message frames round-trip through a stream") {
  Rng rng(77);
  const BlockPartition partition = make_partition({8, 8});
  std::stringstream stream;
  std::vector<CompressedMessage> originals;
  for (int i = 0; i < 20; ++i) {
    originals.push_back(random_message(rng, partition));
    write_frame(stream, encode(originals.back()));
  }
  const auto frames = read_frames(stream);
  REQUIRE(frames.size() == originals.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(decode(frames[i], partition) == originals[i]);
  }
}

TEST_CASE("truncated frame streams are rejected") {
  const BlockPartition partition = make_partition({8});
  CompressedMessage msg;
  msg.blocks.resize(1);
  msg.blocks[0].scale = 1.0f;
  msg.blocks[0].positive.assign(8, true);
  std::stringstream stream;
  write_frame(stream, encode(msg));
  std::string data = stream.str();
  data.resize(data.size() - 2);
  std::stringstream cut(data);
  CHECK_THROWS_AS(read_frames(cut), WireFormatError);
}
