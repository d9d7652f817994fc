// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "strainrom/voigt.hpp"

namespace strainrom {

enum class MaterialKind { NeoHooke, LinearElastic };

MaterialKind parse_material_kind(std::string_view name);
std::string_view to_string(MaterialKind kind) noexcept;

/// Isotropic hyperelastic material.
///
/// NeoHooke uses the compressible energy
///   W(F) = mu/2 (tr(F^T F) - 3) - mu ln J + lambda/2 (ln J)^2,
/// LinearElastic is the small-strain law P = C : (F - I) applied to the full
/// nonsymmetric displacement gradient; its tangent is constant, so reduced
/// models that linearise the material become exact.
struct Material {
  MaterialKind kind = MaterialKind::NeoHooke;
  double E = 1000.0;
  double nu = 0.25;

  [[nodiscard]] double lambda() const noexcept { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  [[nodiscard]] double mu() const noexcept { return E / (2.0 * (1.0 + nu)); }

  /// Throws ConfigError unless E > 0 and -1 < nu < 0.5.
  void validate() const;
};

struct StressTangent {
  VoigtVec9 P;
  VoigtMat9 A;
};

double stored_energy(const Material& mat, const VoigtVec9& F);
VoigtVec9 pk1_stress(const Material& mat, const VoigtVec9& F);
VoigtMat9 nominal_tangent(const Material& mat, const VoigtVec9& F);

/// Stress and tangent in one kernel call. This is the call that online
/// reduced solvers count, see material_evaluation_count().
StressTangent evaluate(const Material& mat, const VoigtVec9& F);

/// Number of evaluate() calls made by the current thread.
std::uint64_t material_evaluation_count() noexcept;
void reset_material_evaluation_count() noexcept;

}  // namespace strainrom
