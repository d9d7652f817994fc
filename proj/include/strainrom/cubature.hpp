// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strainrom/kmeans.hpp"
#include "strainrom/material.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/voigt.hpp"

namespace strainrom {

/// Reduced integration rule in strain space: point c has basis psi^c and
/// weight xi^c. ECM points are original Gauss points, E3C points are
/// corrected cluster centroids.
struct CubatureModel {
  std::string kind = "ECM";
  std::vector<ModeSlice> psi;
  Eigen::VectorXd xi;
  Eigen::VectorXd xi_hom;          ///< optional homogenisation weights, empty if shared
  std::vector<int> gauss_index;    ///< source Gauss point per entry (ECM only)
  double cell_volume = 0.0;
  int d = 0;

  [[nodiscard]] int m() const noexcept { return static_cast<int>(xi.size()); }
  [[nodiscard]] const Eigen::VectorXd& homog_weights() const noexcept { return xi_hom.size() ? xi_hom : xi; }
};

/// Every Gauss point with its own volume: plain POD-Galerkin integration.
CubatureModel full_integration_model(const ModeBasis& basis, const Eigen::VectorXd& volumes, double cell_volume);

/// Centroid model from a clustering, before any correction.
CubatureModel cluster_model(const ClusterPartition& partition, double cell_volume);

/// r = sum_c psi^cT P(Fbar + psi^c y) xi^c. Throws NonPositiveJacobian.
Eigen::VectorXd reduced_residual(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                                 const VoigtVec9& Fbar);
/// K = sum_c psi^cT A(F^c) psi^c xi^c.
Eigen::MatrixXd reduced_tangent(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                                const VoigtVec9& Fbar);

struct RomOptions {
  double tol_rel = 1e-9;
  double tol_abs_factor = 1e-12;  ///< absolute floor = factor * E * V
  int max_iter = 25;
};

struct RomSolution {
  Eigen::VectorXd y;
  int iterations = 0;
  VoigtVec9 Pbar = VoigtVec9::Zero();
  VoigtMat9 Abar = VoigtMat9::Zero();  ///< filled only when requested
};

/// Newton-Raphson on the reduced system from y0. Throws RomDivergence on
/// iteration overflow, inverted points or a singular reduced tangent.
/// Pbar (and Abar when with_tangent is set) use the last material evaluation.
RomSolution newton_solve(const CubatureModel& model, const Material& mat, const VoigtVec9& Fbar,
                         const Eigen::VectorXd& y0, const RomOptions& options = {}, bool with_tangent = false);

/// Pbar = (1/V) sum_c xi_hom^c P(F^c).
VoigtVec9 rom_homogenize(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                         const VoigtVec9& Fbar);

/// Abar = (1/V) sum_c xi_hom^c A^c (I + psi^c X), K X = -L, L = sum_c psi^cT A^c xi^c.
/// Throws SingularTangent.
VoigtMat9 rom_macro_tangent(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                            const VoigtVec9& Fbar);

}  // namespace strainrom
