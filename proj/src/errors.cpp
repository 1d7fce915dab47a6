// Copyright 2026 The qsd Authors
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

#include "qsd/errors.hpp"

namespace qsd {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNotPositive: return "NotPositive";
    case ErrorCode::kTraceNotOne: return "TraceNotOne";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kWrongDimension: return "WrongDimension";
    case ErrorCode::kVectorOutsideBall: return "VectorOutsideBall";
    case ErrorCode::kDimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::kWrongCount: return "WrongCount";
    case ErrorCode::kBadCoefficients: return "BadCoefficients";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNotDistribution: return "NotDistribution";
    case ErrorCode::kCertificateFailed: return "CertificateFailed";
    case ErrorCode::kReconstructionFailed: return "ReconstructionFailed";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kSingularEnsemble: return "SingularEnsemble";
    case ErrorCode::kZeroClickProbability: return "ZeroClickProbability";
    case ErrorCode::kInvalidOperator: return "InvalidOperator";
    case ErrorCode::kMissingPairs: return "MissingPairs";
    case ErrorCode::kIncompleteMeasurement: return "IncompleteMeasurement";
    case ErrorCode::kNotUnitary: return "NotUnitary";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kDisjointSupports: return "DisjointSupports";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
      code_(code) {}

}  // namespace qsd
