// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/error.hpp"

namespace bayesrom {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::NonPositiveEigenvalue: return "non-positive eigenvalue";
    case ErrorCode::RankDeficient: return "rank deficient";
    case ErrorCode::SingularSystem: return "singular system";
    case ErrorCode::AllUnstable: return "all candidates unstable";
    case ErrorCode::StepSizeUnderflow: return "step size underflow";
    case ErrorCode::NewtonDivergence: return "newton iteration diverged";
    case ErrorCode::NonphysicalState: return "nonphysical state";
    case ErrorCode::MissingInputs: return "missing inputs";
    case ErrorCode::PredictionFailed: return "prediction failed";
    case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace bayesrom
