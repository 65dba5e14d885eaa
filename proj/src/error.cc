// glottkit/error.cc

// Copyright 2026 The glottkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "glottkit/error.h"

namespace glottkit {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kMissingFile: return "MissingFile";
    case ErrorKind::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::kCorruptHeader: return "CorruptHeader";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kClippedSamples: return "ClippedSamples";
    case ErrorKind::kLagTooLarge: return "LagTooLarge";
    case ErrorKind::kSingularAutocorrelation: return "SingularAutocorrelation";
    case ErrorKind::kFrameTooShort: return "FrameTooShort";
    case ErrorKind::kNonNormalizable: return "NonNormalizable";
    case ErrorKind::kBadWindow: return "BadWindow";
    case ErrorKind::kInsufficientVoicing: return "InsufficientVoicing";
    case ErrorKind::kNumericalOverflow: return "NumericalOverflow";
    case ErrorKind::kDegenerateFlow: return "DegenerateFlow";
    case ErrorKind::kUnvoicedTarget: return "UnvoicedTarget";
    case ErrorKind::kNoCycleDetected: return "NoCycleDetected";
    case ErrorKind::kSingleClassData: return "SingleClassData";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNoFrames: return "NoFrames";
    case ErrorKind::kUnstableTract: return "UnstableTract";
    case ErrorKind::kBadConfig: return "BadConfig";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + detail),
      kind_(kind) {}

}  // namespace glottkit
