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

#ifndef EVENTINR_ERROR_HPP_
#define EVENTINR_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eventinr {

enum class ErrorKind {
  kMalformedLine,
  kUnsortedStream,
  kPolarityOutOfRange,
  kEmptyStream,
  kInvalidDimensions,
  kNonPositiveIntensity,
  kInvalidArchitecture,
  kNonFiniteOutput,
  kNonFiniteGradient,
  kShapeMismatch,
  kIndexOutOfRange,
  kDegenerateFrame,
  kDivergedTraining,
  kTimeOutOfRange,
  kTooSmall,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception. Optional
// fields carry the location data some error kinds attach.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  // 1-based input line for parse errors.
  std::optional<std::size_t> line;
  // Iteration and partition index for training failures.
  std::optional<int> iteration;
  std::optional<int> partition;

 private:
  ErrorKind kind_;
};

Error parse_error(ErrorKind kind, std::size_t line, const std::string& what);

}  // namespace eventinr

#endif  // EVENTINR_ERROR_HPP_
