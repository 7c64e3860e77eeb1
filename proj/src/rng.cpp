// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsmix/rng.hpp"

#include <cmath>
#include <numbers>

namespace nsmix {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_index)
    : seed_(root_seed), index_(stream_index) {}

RngStream RngStream::child(std::uint64_t tag) const {
  return RngStream(seed_, mix64(index_ ^ mix64(tag + 0x632BE59BD9B4E019ULL)));
}

void RngStream::refill() {
  const std::uint64_t key = mix64(seed_);
  block_ = philox4x32_10(
      {static_cast<std::uint32_t>(counter_),
       static_cast<std::uint32_t>(counter_ >> 32),
       static_cast<std::uint32_t>(index_),
       static_cast<std::uint32_t>(index_ >> 32)},
      {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
  ++counter_;
  block_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (block_pos_ > 2) refill();
  const std::uint64_t lo = block_[block_pos_];
  const std::uint64_t hi = block_[block_pos_ + 1];
  block_pos_ += 2;
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void RngStream::fill_normal(std::span<double> out, double scale) {
  for (double& v : out) v = scale * normal();
}

}  // namespace nsmix
