// SPDX-License-Identifier: Apache-2.0
#include "strainrom/voigt.hpp"

#include "strainrom/error.hpp"

namespace strainrom {

VoigtVec9 voigt_encode(const Tensor2& T) {
  VoigtVec9 v;
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J) v(voigt_index(i, J)) = T(i, J);
  return v;
}

Tensor2 voigt_decode(const VoigtVec9& v) {
  Tensor2 T;
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J) T(i, J) = v(voigt_index(i, J));
  return T;
}

VoigtVec9 voigt_identity() { return voigt_encode(Tensor2::Identity()); }

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositiveJacobian: return "NonPositiveJacobian";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::DisconnectedMatrix: return "DisconnectedMatrix";
    case ErrorKind::UnmatchedBoundaryNode: return "UnmatchedBoundaryNode";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::SingularTangent: return "SingularTangent";
    case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RomDivergence: return "RomDivergence";
    case ErrorKind::MissingStressSnapshots: return "MissingStressSnapshots";
    case ErrorKind::StalledActiveSet: return "StalledActiveSet";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::LineSearchFailure: return "LineSearchFailure";
    case ErrorKind::RankDeficientParameters: return "RankDeficientParameters";
    case ErrorKind::ReferenceInverted: return "ReferenceInverted";
    case ErrorKind::SingularReducedSystem: return "SingularReducedSystem";
    case ErrorKind::ZeroReferenceNorm: return "ZeroReferenceNorm";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace strainrom
