// Copyright 2026 The neqm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "neqm/error.hpp"

namespace neqm {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kSampleRateMismatch: return "SampleRateMismatch";
    case Errc::kTooShort: return "TooShort";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kInvalidDuration: return "InvalidDuration";
    case Errc::kIoError: return "IoError";
    case Errc::kFormatError: return "FormatError";
    case Errc::kStaleCache: return "StaleCache";
    case Errc::kEmptySplit: return "EmptySplit";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kNonFiniteObjective: return "NonFiniteObjective";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kVersionUnsupported: return "VersionUnsupported";
    case Errc::kCorruptPayload: return "CorruptPayload";
    case Errc::kBlockTooLarge: return "BlockTooLarge";
    case Errc::kArchitectureMismatch: return "ArchitectureMismatch";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kPathMismatch: return "PathMismatch";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what),
      code_(code) {}

}  // namespace neqm
