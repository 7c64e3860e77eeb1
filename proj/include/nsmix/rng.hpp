// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace nsmix {

// SplitMix64 finalizer. Used to derive keys and child stream indices.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based Philox4x32-10 stream.
//
// A stream is identified by (root seed, stream index). The seed forms the
// Philox key; the stream index occupies the upper half of the 128-bit counter
// and the draw count the lower half, so distinct indices never share a block.
// child() derives a new index by hashing, which gives a reproducible tree of
// streams for chains, paths, macro steps, ...
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t root_seed, std::uint64_t stream_index);

  std::uint64_t root_seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return index_; }
  std::uint64_t counter() const noexcept { return counter_; }

  RngStream child(std::uint64_t tag) const;

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  void fill_normal(std::span<double> out, double scale = 1.0);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

}  // namespace nsmix
