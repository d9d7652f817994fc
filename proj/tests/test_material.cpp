// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "strainrom/error.hpp"
#include "support.hpp"

using namespace strainrom;
using namespace testing;

namespace {

// Central differences of the stored energy, step h.
VoigtVec9 fd_stress(const Material& mat, const VoigtVec9& F, double h = 1e-6) {
  VoigtVec9 P;
  for (int k = 0; k < 9; ++k) {
    VoigtVec9 Fp = F, Fm = F;
    Fp(k) += h;
    Fm(k) -= h;
    P(k) = (stored_energy(mat, Fp) - stored_energy(mat, Fm)) / (2 * h);
  }
  return P;
}

VoigtMat9 fd_tangent(const Material& mat, const VoigtVec9& F, double h = 1e-6) {
  VoigtMat9 A;
  for (int k = 0; k < 9; ++k) {
    VoigtVec9 Fp = F, Fm = F;
    Fp(k) += h;
    Fm(k) -= h;
    A.col(k) = (pk1_stress(mat, Fp) - pk1_stress(mat, Fm)) / (2 * h);
  }
  return A;
}

double kron(int a, int b) { return a == b ? 1.0 : 0.0; }

}  // namespace

TEST_CASE("voigt ordering is row-major") {
  CHECK(voigt_identity() == (VoigtVec9() << 1, 0, 0, 0, 1, 0, 0, 0, 1).finished());
  Tensor2 T = Tensor2::Identity();
  T(0, 1) = 0.3;
  CHECK(voigt_encode(T)(1) == 0.3);
  CHECK(voigt_index(2, 1) == 7);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const VoigtVec9 v = random_matrix(rng, 9, 1);
    CHECK(voigt_encode(voigt_decode(v)) == v);
  }
}

TEST_CASE("stress-free reference") {
  CHECK(pk1_stress(neo_hooke(), voigt_identity()).norm() == 0.0);
  CHECK(pk1_stress(linear_elastic(), voigt_identity()).norm() == 0.0);
  CHECK(stored_energy(neo_hooke(), voigt_identity()) == 0.0);
}

TEST_CASE("neo-Hooke stress equals the energy gradient") {
  const Material mat = neo_hooke();
  VoigtVec9 F = voigt_identity();
  F(0) = 1.1;
  CHECK(rel_norm(pk1_stress(mat, F), fd_stress(mat, F)) < 1e-7);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const VoigtVec9 Fr = random_F(rng);
    CHECK(rel_norm(pk1_stress(mat, Fr), fd_stress(mat, Fr)) < 1e-6);
  }
}

TEST_CASE("nominal tangent at the reference is the isotropic elasticity tensor") {
  const Material mat = neo_hooke();
  const double lambda = mat.lambda(), mu = mat.mu();
  VoigtMat9 C;
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J)
      for (int k = 0; k < 3; ++k)
        for (int L = 0; L < 3; ++L)
          C(voigt_index(i, J), voigt_index(k, L)) =
              lambda * kron(i, J) * kron(k, L) + mu * (kron(i, k) * kron(J, L) + kron(i, L) * kron(J, k));
  CHECK(rel_norm(nominal_tangent(mat, voigt_identity()), C) < 1e-12);
  CHECK(rel_norm(fd_tangent(mat, voigt_identity()), C) < 1e-6);
  CHECK(rel_norm(nominal_tangent(linear_elastic(), voigt_identity()), C) < 1e-12);
}

TEST_CASE("property: analytic tangent matches finite differences and is major-symmetric") {
  const Material mat = neo_hooke();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const VoigtVec9 F = random_F(rng, 0.3);
    const VoigtMat9 A = nominal_tangent(mat, F);
    CHECK(rel_norm(A, fd_tangent(mat, F)) < 1e-6);
    CHECK((A - A.transpose()).norm() <= 1e-10 * A.norm());
  }
}

TEST_CASE("property: work around a closed strain loop vanishes") {
  const Material mat = neo_hooke();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    const VoigtVec9 a = 0.1 * random_matrix(rng, 9, 1).normalized();
    const VoigtVec9 b = 0.1 * random_matrix(rng, 9, 1).normalized();
    const int n = 1000;
    double work = 0.0, length = 0.0;
    auto at = [&](double t) -> VoigtVec9 {
      return voigt_identity() + a * std::sin(2 * M_PI * t) + b * (1.0 - std::cos(2 * M_PI * t));
    };
    for (int k = 0; k < n; ++k) {
      const VoigtVec9 F0 = at(static_cast<double>(k) / n), F1 = at(static_cast<double>(k + 1) / n);
      const VoigtVec9 dF = F1 - F0;
      // Simpson's rule on each sub-step.
      work += (pk1_stress(mat, F0) + 4 * pk1_stress(mat, 0.5 * (F0 + F1)) + pk1_stress(mat, F1)).dot(dF) / 6.0;
      length += dF.norm();
    }
    CHECK(std::abs(work) < 1e-6 * length * mat.E);
  }
}

TEST_CASE("linear-elastic law is affine with a constant tangent") {
  const Material mat = linear_elastic();
  VoigtVec9 F2 = voigt_identity();
  F2(1) = 0.1;
  CHECK(nominal_tangent(mat, voigt_identity()) == nominal_tangent(mat, F2));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const VoigtVec9 Fa = random_F(rng), Fb = random_F(rng);
    const VoigtVec9 lhs = pk1_stress(mat, Fa) + pk1_stress(mat, Fb) - pk1_stress(mat, voigt_identity());
    const VoigtVec9 rhs = pk1_stress(mat, Fa + Fb - voigt_identity());
    CHECK((lhs - rhs).norm() <= 1e-12 * mat.E);
  }
}

TEST_CASE("inadmissible inputs") {
  VoigtVec9 F = voigt_identity();
  F(0) = -1.0;
  CHECK_THROWS_AS(pk1_stress(neo_hooke(), F), Error);
  try {
    evaluate(neo_hooke(), F);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveJacobian);
  }
  auto kind_of = [](Material m) {
    try {
      m.validate();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind_of({MaterialKind::NeoHooke, -1.0, 0.25}) == ErrorKind::ConfigError);
  CHECK(kind_of({MaterialKind::NeoHooke, 1.0, 0.5}) == ErrorKind::ConfigError);
  CHECK(kind_of({MaterialKind::NeoHooke, 1.0, -1.0}) == ErrorKind::ConfigError);
  CHECK_NOTHROW(Material{}.validate());
  CHECK(parse_material_kind("linear-elastic") == MaterialKind::LinearElastic);
  CHECK_THROWS_AS(parse_material_kind("rubber"), Error);
}

TEST_CASE("evaluate counts calls per thread") {
  reset_material_evaluation_count();
  for (int k = 0; k < 7; ++k) evaluate(neo_hooke(), voigt_identity());
  pk1_stress(neo_hooke(), voigt_identity());
  CHECK(material_evaluation_count() == 7);
  const auto [P, A] = evaluate(neo_hooke(), voigt_identity());
  CHECK(P.norm() == 0.0);
  CHECK(A == nominal_tangent(neo_hooke(), voigt_identity()));
}
