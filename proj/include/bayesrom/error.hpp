// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_ERROR_HPP
#define BAYESROM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bayesrom {

// Mirrors br_status in bayesrom.h; keep the numeric values in sync.
enum class ErrorCode : int {
  InvalidArgument = 1,
  DimensionMismatch = 2,
  Config = 3,
  Io = 4,
  NonPositiveEigenvalue = 5,
  RankDeficient = 6,
  SingularSystem = 7,
  AllUnstable = 8,
  StepSizeUnderflow = 9,
  NewtonDivergence = 10,
  NonphysicalState = 11,
  MissingInputs = 12,
  PredictionFailed = 13,
  Internal = 14,
};

const char* to_string(ErrorCode code) noexcept;

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

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// Re-throws `e` with `stage` prepended to the message, keeping the code.
[[noreturn]] inline void rethrow_tagged(const Error& e, const std::string& stage) {
  throw Error(e.code(), stage + ": " + e.what());
}

}  // namespace bayesrom

#endif  // BAYESROM_ERROR_HPP
