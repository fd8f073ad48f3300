// Copyright 2026 The polytraj Authors
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

#ifndef POLYTRAJ_ERROR_HPP_
#define POLYTRAJ_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace polytraj
{

enum class ErrorCode {
  kOutOfDomain,
  kDegenerateHeading,
  kInvalidTimes,
  kInvalidInput,
  kInvalidConfig,
  kInsufficientData,
  kSingularSystem,
  kNonFinite,
  kEmptyInput,
  kHeadingUnavailable,
  kNonUniformTimes,
  kTooShort,
  kIo,
  kSchema,
};

constexpr std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::kOutOfDomain: return "OutOfDomain";
    case ErrorCode::kDegenerateHeading: return "DegenerateHeading";
    case ErrorCode::kInvalidTimes: return "InvalidTimes";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kHeadingUnavailable: return "HeadingUnavailable";
    case ErrorCode::kNonUniformTimes: return "NonUniformTimes";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kIo: return "IO";
    case ErrorCode::kSchema: return "Schema";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace polytraj

#endif  // POLYTRAJ_ERROR_HPP_
