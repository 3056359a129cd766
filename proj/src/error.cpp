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

#include "bcprobe/error.hpp"

namespace bcprobe {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kNonMonotoneTurnIndex: return "NonMonotoneTurnIndex";
    case ErrorCode::kMoreThanTwoSpeakers: return "MoreThanTwoSpeakers";
    case ErrorCode::kInvalidFraction: return "InvalidFraction";
    case ErrorCode::kDuplicateVariant: return "DuplicateVariant";
    case ErrorCode::kEmptyEntry: return "EmptyEntry";
    case ErrorCode::kLanguageMismatch: return "LanguageMismatch";
    case ErrorCode::kInvalidPolicy: return "InvalidPolicy";
    case ErrorCode::kEmptyRandomPool: return "EmptyRandomPool";
    case ErrorCode::kSpanNotFound: return "SpanNotFound";
    case ErrorCode::kTooFewRecords: return "TooFewRecords";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kSingleCluster: return "SingleCluster";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kEmptyGenerationSet: return "EmptyGenerationSet";
    case ErrorCode::kNoMarkerTokens: return "NoMarkerTokens";
    case ErrorCode::kEmptyPair: return "EmptyPair";
    case ErrorCode::kMissingVectors: return "MissingVectors";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bcprobe
