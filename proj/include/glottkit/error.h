// glottkit/error.h

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

#ifndef GLOTTKIT_ERROR_H_
#define GLOTTKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace glottkit {

enum class ErrorKind {
  kInvalidArgument,
  kMissingFile,
  kUnsupportedEncoding,
  kCorruptHeader,
  kIoError,
  kClippedSamples,
  kLagTooLarge,
  kSingularAutocorrelation,
  kFrameTooShort,
  kNonNormalizable,
  kBadWindow,
  kInsufficientVoicing,
  kNumericalOverflow,
  kDegenerateFlow,
  kUnvoicedTarget,
  kNoCycleDetected,
  kSingleClassData,
  kDimensionMismatch,
  kNoFrames,
  kUnstableTract,
  kBadConfig,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this type; `kind()` is the
// stable, testable part and `what()` carries a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace glottkit

#endif  // GLOTTKIT_ERROR_H_
