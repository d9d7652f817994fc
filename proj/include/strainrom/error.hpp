// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strainrom {

enum class ErrorKind {
  NonPositiveJacobian,
  EmptyMatrix,
  DisconnectedMatrix,
  UnmatchedBoundaryNode,
  NewtonDivergence,
  SingularTangent,
  FormatVersionMismatch,
  ChecksumMismatch,
  IoError,
  RankDeficient,
  DimensionMismatch,
  RomDivergence,
  MissingStressSnapshots,
  StalledActiveSet,
  EmptySelection,
  LineSearchFailure,
  RankDeficientParameters,
  ReferenceInverted,
  SingularReducedSystem,
  ZeroReferenceNorm,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for all library failures; `kind()` identifies the
/// failure class so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace strainrom
