// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "strainrom/material.hpp"
#include "strainrom/mesh.hpp"
#include "strainrom/voigt.hpp"

namespace strainrom {

/// Converged (or reference) full-order state for one macroscopic load.
struct FomState {
  Eigen::VectorXd u;  ///< fluctuation displacement on independent DOFs
  VoigtVec9 Fbar = voigt_identity();
  std::vector<VoigtVec9> F;
  std::vector<VoigtVec9> P;
  std::vector<VoigtMat9> A;
  bool converged = false;
  int iterations = 0;  ///< Newton corrections applied
  std::vector<double> residual_history;
};

struct FomOptions {
  double tol_rel = 1e-9;
  double tol_abs_factor = 1e-11;  ///< absolute tolerance = factor * E * V
  int max_iter = 25;
};

/// Periodic hyperelastic finite element solver on a voxel RVE. The unknown is
/// the periodic displacement fluctuation; F = Fbar + grad(u~) at every Gauss
/// point. Assembly order is fixed, so results are bit-reproducible.
class FomSolver {
 public:
  FomSolver(Mesh mesh, Material material, FomOptions options = {});

  [[nodiscard]] const Mesh& mesh() const noexcept { return mesh_; }
  [[nodiscard]] const Material& material() const noexcept { return material_; }
  [[nodiscard]] const GaussTable& gauss() const noexcept { return gauss_; }
  [[nodiscard]] const PeriodicMap& periodic() const noexcept { return periodic_; }
  [[nodiscard]] int dofs() const noexcept { return periodic_.independent_dofs(); }
  [[nodiscard]] double cell_volume() const noexcept { return mesh_.cell_volume(); }

  /// Undeformed state: u = 0, Fbar = I, fields evaluated at F = I.
  [[nodiscard]] FomState reference_state() const;

  /// Newton-Raphson on the periodic-reduced system, warm-started from prev.
  /// Throws NewtonDivergence after max_iter corrections or when any Gauss
  /// point inverts.
  FomState solve_increment(const VoigtVec9& Fbar, const FomState& prev);

  /// Consistent macroscopic tangent from nine sensitivity solves with the
  /// converged stiffness. Throws SingularTangent if factorization fails.
  VoigtMat9 macro_tangent(const FomState& state);

  /// Gauss-point deformation gradients for a given fluctuation and load.
  [[nodiscard]] std::vector<VoigtVec9> strains(const Eigen::VectorXd& u, const VoigtVec9& Fbar) const;

  /// Residual of the periodic weak form at given stresses.
  [[nodiscard]] Eigen::VectorXd residual(const std::vector<VoigtVec9>& P) const;

 private:
  void assemble_stiffness(const std::vector<VoigtMat9>& A);
  bool factorize();

  Mesh mesh_;
  Material material_;
  FomOptions options_;
  GaussTable gauss_;
  PeriodicMap periodic_;
  std::vector<std::array<int, 24>> element_dofs_;
  Eigen::SparseMatrix<double> stiffness_;
  std::vector<int> value_slot_;  // per element 24x24 -> index into stiffness_ values, -1 if pinned
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool pattern_analyzed_ = false;
};

/// Pbar = (1/V) sum_g P^g V^g with V the full cell volume, pores included.
VoigtVec9 homogenize_stress(const FomState& state, const GaussTable& gauss, double cell_volume);

/// Concatenated 9|G| vector of Gauss-point deformation gradients.
Eigen::VectorXd gauss_strains(const FomState& state);

/// Same layout for stresses.
Eigen::VectorXd gauss_stresses(const FomState& state);

}  // namespace strainrom
