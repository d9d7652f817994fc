// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and hand-rolled generators for the unit tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "strainrom/fom.hpp"
#include "strainrom/material.hpp"
#include "strainrom/mesh.hpp"
#include "strainrom/sampling.hpp"
#include "strainrom/voigt.hpp"

namespace testing {

using namespace strainrom;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <typename A, typename B>
double rel_norm(const A& a, const B& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

/// Random admissible F = I + H with ||H|| bounded so det F stays positive.
inline VoigtVec9 random_F(std::mt19937_64& rng, double scale = 0.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    VoigtVec9 F = voigt_identity();
    for (int k = 0; k < 9; ++k) F(k) += scale * u(rng);
    if (voigt_decode(F).determinant() > 0.2) return F;
  }
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = n(rng);
  return M;
}

inline Material neo_hooke() { return Material{MaterialKind::NeoHooke, 1000.0, 0.25}; }
inline Material linear_elastic() { return Material{MaterialKind::LinearElastic, 1000.0, 0.25}; }

/// Cell without pores; every Gauss point carries the same strain.
inline Mesh solid_cell(int n = 2, double L = 2.0) { return build_rve(n, {}, L); }

/// Small porous cell used by the cheaper FOM-backed tests.
inline Mesh porous_cell() {
  const std::vector<Pore> pores{{Eigen::Vector3d(1.0, 1.0, 1.0), 0.55}};
  return build_rve(4, pores, 2.0);
}

inline Mesh desk_cell() { return build_rve(8, default_pores(), 2.0); }

/// Snapshots along a few random paths on a mesh.
inline SnapshotSet small_snapshots(const Mesh& mesh, const Material& mat, int paths, int steps, std::uint64_t seed,
                                   bool stresses = true, double dflp = 0.025, double dfls = 0.015) {
  CollectOptions o;
  o.with_stresses = stresses;
  o.strict = true;
  return collect_snapshots(generate_load_paths(seed, paths, steps, dflp, dfls), mesh, mat, o);
}

}  // namespace testing
