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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsd {

// Every failure raised by the toolkit carries one of these codes so that
// callers (and the command-line front end) can react without parsing text.
enum class ErrorCode {
  kNotHermitian,
  kNotPositive,
  kTraceNotOne,
  kNoConvergence,
  kDimensionMismatch,
  kWrongDimension,
  kVectorOutsideBall,
  kDimensionCapExceeded,
  kWrongCount,
  kBadCoefficients,
  kOutOfRange,
  kNotDistribution,
  kCertificateFailed,
  kReconstructionFailed,
  kInfeasible,
  kSingularEnsemble,
  kZeroClickProbability,
  kInvalidOperator,
  kMissingPairs,
  kIncompleteMeasurement,
  kNotUnitary,
  kNotFound,
  kDisjointSupports,
  kInvalidArgument,
  kParseError,
  kValidationError,
};

// Stable identifier such as "NotHermitian".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qsd
