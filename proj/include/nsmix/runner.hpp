// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsmix {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCensoring = 3;

struct RunRequest {
  std::string command;  // simulate | couple | mix | bel-check | invariant | small-noise
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0: hardware concurrency
  std::vector<std::string> overrides;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::string> files;  // written, relative to the output directory
};

const std::vector<std::string>& known_commands();

// Never throws; failures are reported through the exit code and message.
RunOutcome run(const RunRequest& request);

}  // namespace nsmix
