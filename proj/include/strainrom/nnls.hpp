// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace strainrom {

struct NnlsResult {
  Eigen::VectorXd x;
  std::vector<int> support;              ///< indices with x > 0, in selection order
  double residual = 0.0;                 ///< ||A x - b||
  std::vector<double> residual_history;  ///< after each outer iteration
  int iterations = 0;
  bool reached_tolerance = false;        ///< stopped on tol rather than support size or optimality
};

/// Lawson-Hanson active-set NNLS on column-normalised A. Stops when
/// ||A x - b|| <= tol ||b||, when m_target columns are active, or at the
/// unconstrained optimum of the non-negative problem. Throws StalledActiveSet
/// if a newly selected column cannot enter the passive set or the iteration
/// budget (3 * columns) runs out.
NnlsResult lawson_hanson_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int m_target, double tol);

}  // namespace strainrom
