// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "strainrom/kmeans.hpp"
#include "strainrom/material.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/sampling.hpp"
#include "strainrom/voigt.hpp"

namespace strainrom {

/// Offline data for the per-step cluster linearisation. D[c] is the Gram
/// operator sum_{g in c} vec(psi^g) vec(psi^g)^T V^g with vec() flattening a
/// 9 x d slice row-major, so entry (gamma*d + alpha, delta*d + beta) holds
/// sum_g psi^g_{gamma alpha} psi^g_{delta beta} V^g.
struct EmslModel {
  std::vector<ModeSlice> psi;
  std::vector<ModeSlice> psi_bar;
  Eigen::VectorXd xi;
  std::vector<Eigen::MatrixXd> D;
  Eigen::MatrixXd M;  ///< d x 9 map from Fbar to predicted reduced coordinates
  double cell_volume = 0.0;
  int d = 0;

  // Derived by emsl_prepare from psi, psi_bar and D. Psi and PsiBar stack the
  // slices (9m x d). B_sym maps the 45 symmetric-part coefficients of every
  // A^c to the upper triangle of B, B_skew maps the 36 skew-part coefficients
  // to the strict upper triangle.
  Eigen::MatrixXd Psi;
  Eigen::MatrixXd PsiBar;
  Eigen::MatrixXd B_sym;
  Eigen::MatrixXd B_skew;

  [[nodiscard]] int m() const noexcept { return static_cast<int>(xi.size()); }
  [[nodiscard]] bool prepared() const noexcept {
    return Psi.rows() == 9 * m() && Psi.cols() == d && B_sym.cols() == 45 * m();
  }
};

/// Fills the derived operators of the model.
void emsl_prepare(EmslModel& model);

struct LinearMapFit {
  Eigen::MatrixXd M;
  double condition = 0.0;   ///< cond(Fbar Fbar^T)
  bool regularized = false; ///< Tikhonov 1e-12 trace was added
  double residual = 0.0;    ///< ||Y - M Fbar||_F
};

/// Least-squares M with Y ~ M Fbar via SVD. Adds 1e-12 * trace(Fbar Fbar^T)
/// on the diagonal when the condition number exceeds 1e12. Throws
/// RankDeficientParameters when Fbar has rank below 9.
LinearMapFit fit_linear_map(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Fbar);

EmslModel emsl_offline(const ModeBasis& basis, const ClusterPartition& partition, const Eigen::VectorXd& volumes,
                       const Eigen::MatrixXd& M, double cell_volume);

struct Reference {
  Eigen::VectorXd ybar;
  std::vector<VoigtVec9> F;
};

/// ybar = M Fbar, F^c = Fbar + psi^c ybar. Throws ReferenceInverted.
Reference predict_reference(const EmslModel& model, const VoigtVec9& Fbar);
/// Same with a given ybar (fixed-point passes).
Reference reference_at(const EmslModel& model, const VoigtVec9& Fbar, const Eigen::VectorXd& ybar);

struct EmslSystem {
  Eigen::VectorXd a;      ///< sum_c psi_bar^cT Phat^c
  Eigen::MatrixXd B;      ///< sum_c A^c : D^c
  VoigtVec9 c = VoigtVec9::Zero();  ///< sum_c xi^c Phat^c
  Eigen::Matrix<double, 9, Eigen::Dynamic> D;  ///< sum_c A^c psi_bar^c
  VoigtMat9 A_voigt = VoigtMat9::Zero();       ///< sum_c xi^c A^c

  /// Linearised reduced residual a + B y.
  [[nodiscard]] Eigen::VectorXd residual(const Eigen::VectorXd& y) const { return a + B * y; }
};

/// Phat^c = P^c - A^c psi^c ybar, then the affine operators above.
EmslSystem emsl_assemble(const EmslModel& model, const std::vector<VoigtVec9>& P, const std::vector<VoigtMat9>& A,
                         const Eigen::VectorXd& ybar);

struct EmslStepResult {
  Eigen::VectorXd ybar;
  Eigen::VectorXd y;
  VoigtVec9 Pbar = VoigtVec9::Zero();
  VoigtMat9 Abar = VoigtMat9::Zero();
  VoigtMat9 Abar_voigt = VoigtMat9::Zero();  ///< (1/V) sum_c xi^c A^c, without the D X term
  std::vector<VoigtVec9> F;                  ///< reference strains of the last pass
  EmslSystem system;                         ///< operators of the last pass
  int passes = 0;
  bool stalled = false;                      ///< fixed point hit max_passes without converging
  double seconds = 0.0;
};

/// One affine solve: exactly m material evaluations, no Newton loop.
/// Throws ReferenceInverted or SingularReducedSystem.
EmslStepResult emsl_step(const EmslModel& model, const Material& mat, const VoigtVec9& Fbar,
                         const Eigen::VectorXd& y_prev);

/// Repeats the step with the reference re-predicted from the current y until
/// ||dy|| < tol ||y|| or max_passes. Pass 1 is emsl_step.
EmslStepResult emsl_fixed_point(const EmslModel& model, const Material& mat, const VoigtVec9& Fbar,
                                const Eigen::VectorXd& y_prev, int max_passes, double tol);

struct EmslOptions {
  int m = 20;
  std::uint64_t seed = 1;
};

struct EmslTraining {
  EmslModel model;
  ClusterPartition partition;
  LinearMapFit map;
};

EmslTraining train_emsl(const ModeBasis& basis, const SnapshotSet& set, const EmslOptions& options);

}  // namespace strainrom
