// SPDX-License-Identifier: Apache-2.0
#include "strainrom/material.hpp"

#include <cmath>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

thread_local std::uint64_t evaluation_counter = 0;

Tensor2 checked_inverse(const Tensor2& F, double& J) {
  J = F.determinant();
  if (!(J > 0.0)) raise(ErrorKind::NonPositiveJacobian, fmt::format("det F = {:.6g}", J));
  return F.inverse();
}

VoigtVec9 neo_hooke_stress(double mu, double lambda, const Tensor2& F, const Tensor2& Finv, double J) {
  const Tensor2 FinvT = Finv.transpose();
  return voigt_encode(mu * (F - FinvT) + lambda * std::log(J) * FinvT);
}

VoigtMat9 neo_hooke_tangent(double mu, double lambda, const Tensor2& Finv, double J) {
  // A_iJkL = mu d_ik d_JL + (mu - lambda ln J) Finv_Jk Finv_Li + lambda Finv_Ji Finv_Lk
  const double c = mu - lambda * std::log(J);
  VoigtMat9 A;
  for (int i = 0; i < 3; ++i)
    for (int J_ = 0; J_ < 3; ++J_)
      for (int k = 0; k < 3; ++k)
        for (int L = 0; L < 3; ++L) {
          double v = c * Finv(J_, k) * Finv(L, i) + lambda * Finv(J_, i) * Finv(L, k);
          if (i == k && J_ == L) v += mu;
          A(voigt_index(i, J_), voigt_index(k, L)) = v;
        }
  return A;
}

VoigtMat9 isotropic_stiffness(double mu, double lambda) {
  VoigtMat9 C = VoigtMat9::Zero();
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J)
      for (int k = 0; k < 3; ++k)
        for (int L = 0; L < 3; ++L) {
          double v = 0.0;
          if (i == J && k == L) v += lambda;
          if (i == k && J == L) v += mu;
          if (i == L && J == k) v += mu;
          C(voigt_index(i, J), voigt_index(k, L)) = v;
        }
  return C;
}

}  // namespace

MaterialKind parse_material_kind(std::string_view name) {
  if (name == "neo-hooke" || name == "neohooke") return MaterialKind::NeoHooke;
  if (name == "linear-elastic" || name == "linear") return MaterialKind::LinearElastic;
  raise(ErrorKind::ConfigError, fmt::format("unknown material kind '{}'", name));
}

std::string_view to_string(MaterialKind kind) noexcept {
  return kind == MaterialKind::NeoHooke ? "neo-hooke" : "linear-elastic";
}

void Material::validate() const {
  if (!(E > 0.0)) raise(ErrorKind::ConfigError, fmt::format("Young's modulus must be positive, got {}", E));
  if (!(nu > -1.0 && nu < 0.5))
    raise(ErrorKind::ConfigError, fmt::format("Poisson ratio must lie in (-1, 0.5), got {}", nu));
}

double stored_energy(const Material& mat, const VoigtVec9& Fv) {
  const Tensor2 F = voigt_decode(Fv);
  if (mat.kind == MaterialKind::LinearElastic) {
    const VoigtVec9 H = Fv - voigt_identity();
    return 0.5 * H.dot(isotropic_stiffness(mat.mu(), mat.lambda()) * H);
  }
  const double J = F.determinant();
  if (!(J > 0.0)) raise(ErrorKind::NonPositiveJacobian, fmt::format("det F = {:.6g}", J));
  const double lnJ = std::log(J);
  return 0.5 * mat.mu() * ((F.transpose() * F).trace() - 3.0) - mat.mu() * lnJ +
         0.5 * mat.lambda() * lnJ * lnJ;
}

VoigtVec9 pk1_stress(const Material& mat, const VoigtVec9& Fv) {
  const Tensor2 F = voigt_decode(Fv);
  double J = 0.0;
  const Tensor2 Finv = checked_inverse(F, J);
  if (mat.kind == MaterialKind::LinearElastic)
    return isotropic_stiffness(mat.mu(), mat.lambda()) * (Fv - voigt_identity());
  return neo_hooke_stress(mat.mu(), mat.lambda(), F, Finv, J);
}

VoigtMat9 nominal_tangent(const Material& mat, const VoigtVec9& Fv) {
  const Tensor2 F = voigt_decode(Fv);
  double J = 0.0;
  const Tensor2 Finv = checked_inverse(F, J);
  if (mat.kind == MaterialKind::LinearElastic) return isotropic_stiffness(mat.mu(), mat.lambda());
  return neo_hooke_tangent(mat.mu(), mat.lambda(), Finv, J);
}

StressTangent evaluate(const Material& mat, const VoigtVec9& Fv) {
  ++evaluation_counter;
  const Tensor2 F = voigt_decode(Fv);
  double J = 0.0;
  const Tensor2 Finv = checked_inverse(F, J);
  if (mat.kind == MaterialKind::LinearElastic) {
    const VoigtMat9 C = isotropic_stiffness(mat.mu(), mat.lambda());
    return {C * (Fv - voigt_identity()), C};
  }
  return {neo_hooke_stress(mat.mu(), mat.lambda(), F, Finv, J),
          neo_hooke_tangent(mat.mu(), mat.lambda(), Finv, J)};
}

std::uint64_t material_evaluation_count() noexcept { return evaluation_counter; }
void reset_material_evaluation_count() noexcept { evaluation_counter = 0; }

}  // namespace strainrom
