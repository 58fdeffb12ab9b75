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

#pragma once

#include <stdexcept>
#include <string>

namespace itemvoice {

enum class ErrorKind {
  // input / configuration validation
  UnsupportedFormat,
  CorruptFile,
  BadHeader,
  SplitLeak,
  MissingScore,
  ScoreOutOfRange,
  DimensionMismatch,
  NonFiniteValue,
  EmptyManifest,
  TooShort,
  DegenerateFilter,
  ShapeMismatch,
  InvalidRate,
  InvalidTarget,
  BadSequenceLength,
  EmptyGrid,
  LengthMismatch,
  IncompleteDecisions,
  EmptySplit,
  MissingCheckpoint,
  BadConfig,
  // runtime / numeric failures
  NonFiniteGradient,
  IoError,
};

const char* to_string(ErrorKind kind);

/// True for errors that indicate bad inputs rather than a failure while
/// computing; the CLI maps the former to exit code 2 and the latter to 3.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace itemvoice
