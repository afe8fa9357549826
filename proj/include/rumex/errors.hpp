// Copyright 2026 The Authors.
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

#ifndef RUMEX_ERRORS_HPP
#define RUMEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rumex {

enum class ErrorCode {
  UnknownNode,
  DuplicateId,
  DisconnectedRumour,
  FeatureDimMismatch,
  InfeasibleEdgeCount,
  EmptySeedSet,
  SizeLimitExceeded,
  SchemaMismatch,
  NonFiniteLoss,
  ZeroVector,
  NoEdges,
  StaleQuery,
  NotCalibrated,
  TooManySubsets,
  ModelMissing,
  ConfigError,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DisconnectedRumour: return "DisconnectedRumour";
    case ErrorCode::FeatureDimMismatch: return "FeatureDimMismatch";
    case ErrorCode::InfeasibleEdgeCount: return "InfeasibleEdgeCount";
    case ErrorCode::EmptySeedSet: return "EmptySeedSet";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::StaleQuery: return "StaleQuery";
    case ErrorCode::NotCalibrated: return "NotCalibrated";
    case ErrorCode::TooManySubsets: return "TooManySubsets";
    case ErrorCode::ModelMissing: return "ModelMissing";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported through this one exception type so that
// callers (and the CLI) can map them to stable machine-readable codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rumex

#endif  // RUMEX_ERRORS_HPP
