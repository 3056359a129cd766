// Copyright 2026 The bcprobe Authors.
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

#ifndef BCPROBE_ERROR_HPP_
#define BCPROBE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bcprobe {

enum class ErrorCode {
  kMalformedRecord,
  kNonMonotoneTurnIndex,
  kMoreThanTwoSpeakers,
  kInvalidFraction,
  kDuplicateVariant,
  kEmptyEntry,
  kLanguageMismatch,
  kInvalidPolicy,
  kEmptyRandomPool,
  kSpanNotFound,
  kTooFewRecords,
  kDimensionMismatch,
  kKTooLarge,
  kSingleCluster,
  kTooFewPoints,
  kEmptyGenerationSet,
  kNoMarkerTokens,
  kEmptyPair,
  kMissingVectors,
  kInvalidConfig,
  kIoError,
};

// Stable identifier used in machine-readable error output.
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bcprobe

#endif  // BCPROBE_ERROR_HPP_
