// Copyright 2026 The eventinr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eventinr/error.hpp"

namespace eventinr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedLine: return "MalformedLine";
    case ErrorKind::kUnsortedStream: return "UnsortedStream";
    case ErrorKind::kPolarityOutOfRange: return "PolarityOutOfRange";
    case ErrorKind::kEmptyStream: return "EmptyStream";
    case ErrorKind::kInvalidDimensions: return "InvalidDimensions";
    case ErrorKind::kNonPositiveIntensity: return "NonPositiveIntensity";
    case ErrorKind::kInvalidArchitecture: return "InvalidArchitecture";
    case ErrorKind::kNonFiniteOutput: return "NonFiniteOutput";
    case ErrorKind::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::kDegenerateFrame: return "DegenerateFrame";
    case ErrorKind::kDivergedTraining: return "DivergedTraining";
    case ErrorKind::kTimeOutOfRange: return "TimeOutOfRange";
    case ErrorKind::kTooSmall: return "TooSmall";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

Error parse_error(ErrorKind kind, std::size_t line, const std::string& what) {
  Error err(kind, "line " + std::to_string(line) + ": " + what);
  err.line = line;
  return err;
}

}  // namespace eventinr
