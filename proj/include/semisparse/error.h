// Copyright 2026 The semisparse Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace semisparse {

enum class ErrorCode {
  kIndexOutOfRange,
  kDegenerateFace,
  kNonManifoldEdge,
  kInconsistentOrientation,
  kParseError,
  kUnsupportedElement,
  kNonTriangleFace,
  kEmptyMesh,
  kIoError,
  kLengthMismatch,
  kSolverDiverged,
  kNonFiniteValue,
  kInvalidArgument,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDegenerateFace: return "DegenerateFace";
    case ErrorCode::kNonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::kInconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedElement: return "UnsupportedElement";
    case ErrorCode::kNonTriangleFace: return "NonTriangleFace";
    case ErrorCode::kEmptyMesh: return "EmptyMesh";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSolverDiverged: return "SolverDiverged";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace semisparse
