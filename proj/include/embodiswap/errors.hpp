// Copyright 2026 The EmbodiSwap Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace embodiswap {

/// Failure categories surfaced by the library. Every throwing operation
/// documents which of these it can raise.
enum class Errc {
  NonPositiveDepth,
  DegenerateHand,
  MalformedXml,
  UnsupportedJointType,
  CyclicKinematics,
  MissingLink,
  ConfigLengthMismatch,
  UnsupportedFormat,
  CorruptFile,
  NonPositiveDimension,
  DimensionMismatch,
  LookaheadOutOfRange,
  UnknownActionClass,
  OverlappingSubActions,
  UnorderedSpans,
  UnknownHand,
  NoUsedSubActions,
  BundleInvalid,
  UrdfLoadFailure,
  ConfigInvalid,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPositiveDepth: return "NonPositiveDepth";
    case Errc::DegenerateHand: return "DegenerateHand";
    case Errc::MalformedXml: return "MalformedXml";
    case Errc::UnsupportedJointType: return "UnsupportedJointType";
    case Errc::CyclicKinematics: return "CyclicKinematics";
    case Errc::MissingLink: return "MissingLink";
    case Errc::ConfigLengthMismatch: return "ConfigLengthMismatch";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::NonPositiveDimension: return "NonPositiveDimension";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::LookaheadOutOfRange: return "LookaheadOutOfRange";
    case Errc::UnknownActionClass: return "UnknownActionClass";
    case Errc::OverlappingSubActions: return "OverlappingSubActions";
    case Errc::UnorderedSpans: return "UnorderedSpans";
    case Errc::UnknownHand: return "UnknownHand";
    case Errc::NoUsedSubActions: return "NoUsedSubActions";
    case Errc::BundleInvalid: return "BundleInvalid";
    case Errc::UrdfLoadFailure: return "UrdfLoadFailure";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace embodiswap
