// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "strainrom/sampling.hpp"
#include "strainrom/voigt.hpp"

namespace strainrom {

using ModeSlice = Eigen::Matrix<double, 9, Eigen::Dynamic>;

/// Orthonormal strain-fluctuation modes. Rows are grouped in Gauss-point
/// blocks of 9, so psi^g = psi.middleRows(9g, 9).
struct ModeBasis {
  Eigen::MatrixXd psi;
  Eigen::VectorXd sigma;  ///< leading d singular values, non-increasing

  [[nodiscard]] int d() const noexcept { return static_cast<int>(psi.cols()); }
  [[nodiscard]] Eigen::Index n_gauss() const noexcept { return psi.rows() / 9; }
  [[nodiscard]] ModeSlice slice(Eigen::Index g) const { return psi.middleRows(9 * g, 9); }
};

/// Thin SVD of the fluctuation matrix; the largest-magnitude entry of every
/// mode is made positive. Throws RankDeficient if d < 1, d exceeds the matrix
/// dimensions, or sigma_d / sigma_1 < 1e-12.
ModeBasis compute_basis(const Eigen::MatrixXd& fluctuations, int d);
ModeBasis compute_basis(const SnapshotSet& set, int d);

/// Number of singular values with sigma_k / sigma_1 >= 1e-12.
int numerical_rank(const Eigen::MatrixXd& fluctuations);

/// Y^s = psi^T Ftilde^s. Throws DimensionMismatch on a Gauss-count mismatch.
Eigen::MatrixXd reduced_coords(const ModeBasis& basis, const SnapshotSet& set);
Eigen::MatrixXd reduced_coords(const ModeBasis& basis, const Eigen::MatrixXd& fluctuations);

/// F^g = Fbar + psi^g y for every Gauss point.
std::vector<VoigtVec9> reconstruct_field(const ModeBasis& basis, const Eigen::VectorXd& y, const VoigtVec9& Fbar);

/// ||Ftilde - psi psi^T Ftilde||_F / ||Ftilde||_F.
double projection_error(const ModeBasis& basis, const Eigen::MatrixXd& fluctuations);

}  // namespace strainrom
