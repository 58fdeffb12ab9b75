// Copyright 2026 The itemvoice Authors
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

#include "itemvoice/error.hpp"

namespace itemvoice {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::SplitLeak: return "SplitLeak";
    case ErrorKind::MissingScore: return "MissingScore";
    case ErrorKind::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::EmptyManifest: return "EmptyManifest";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::DegenerateFilter: return "DegenerateFilter";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidRate: return "InvalidRate";
    case ErrorKind::InvalidTarget: return "InvalidTarget";
    case ErrorKind::BadSequenceLength: return "BadSequenceLength";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IncompleteDecisions: return "IncompleteDecisions";
    case ErrorKind::EmptySplit: return "EmptySplit";
    case ErrorKind::MissingCheckpoint: return "MissingCheckpoint";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFiniteGradient:
    case ErrorKind::IoError:
      return false;
    default:
      return true;
  }
}

void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace itemvoice
