// Copyright 2026 The nsmix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nsmix {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch,
  kDegenerateNoise,
  kMissingNoiseRecord,
  kOffGrid,
  kBlowUp,
  kInsufficientData,
  kConfig,
  kIo,
  kCensoringOverflow,
};

// Every failure raised by the library carries one of the codes above; the C
// API maps them one-to-one onto its integer status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const char* what) {
  if (!condition) fail(code, what);
}

}  // namespace nsmix
