// Copyright 2026 The dimdrop Authors
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

namespace dimdrop {

// Failure taxonomy. Numerical checks in this library never silently repair a
// bad input: every refusal carries one of these kinds so callers (and the CLI
// exit-code logic) can tell configuration mistakes from genuine invariant
// violations.
enum class ErrorKind {
  NotUnitary,
  BranchFailure,
  DimensionMismatch,
  SizeMismatch,
  BoundaryViolation,
  GlueMismatch,
  UnwrapFailure,
  NotInHnj,
  ClassMismatch,
  NyquistViolation,
  RankJump,
  NotCoprime,
  NotCornerUnitary,
  NotFull,
  SubprojectionFailure,
  PreconditionViolation,
  Config,
  Serialization,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define DIMDROP_DEFINE_ERROR(Name, Kind)                 \
  class Name : public Error {                            \
   public:                                               \
    explicit Name(const std::string& message)            \
        : Error(ErrorKind::Kind, message) {}             \
  }

DIMDROP_DEFINE_ERROR(NotUnitaryError, NotUnitary);
DIMDROP_DEFINE_ERROR(BranchFailureError, BranchFailure);
DIMDROP_DEFINE_ERROR(DimensionMismatchError, DimensionMismatch);
DIMDROP_DEFINE_ERROR(SizeMismatchError, SizeMismatch);
DIMDROP_DEFINE_ERROR(BoundaryViolationError, BoundaryViolation);
DIMDROP_DEFINE_ERROR(GlueMismatchError, GlueMismatch);
DIMDROP_DEFINE_ERROR(UnwrapFailureError, UnwrapFailure);
DIMDROP_DEFINE_ERROR(NotInHnjError, NotInHnj);
DIMDROP_DEFINE_ERROR(ClassMismatchError, ClassMismatch);
DIMDROP_DEFINE_ERROR(NyquistViolationError, NyquistViolation);
DIMDROP_DEFINE_ERROR(RankJumpError, RankJump);
DIMDROP_DEFINE_ERROR(NotCoprimeError, NotCoprime);
DIMDROP_DEFINE_ERROR(NotCornerUnitaryError, NotCornerUnitary);
DIMDROP_DEFINE_ERROR(NotFullError, NotFull);
DIMDROP_DEFINE_ERROR(SubprojectionFailureError, SubprojectionFailure);
DIMDROP_DEFINE_ERROR(PreconditionError, PreconditionViolation);
DIMDROP_DEFINE_ERROR(ConfigError, Config);
DIMDROP_DEFINE_ERROR(SerializationError, Serialization);

#undef DIMDROP_DEFINE_ERROR

}  // namespace dimdrop
