// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "strainrom/material.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/voigt.hpp"

namespace strainrom {

/// Cauchy stress sigma = P F^T / J.
Tensor2 cauchy_stress(const VoigtVec9& P, const VoigtVec9& F);
double von_mises(const Tensor2& sigma);

/// Von Mises stress at every Gauss point of the field F^g = Fbar + psi^g y.
/// Throws NonPositiveJacobian if a reconstructed point is inverted.
std::vector<double> local_stress_field(const ModeBasis& basis, const Material& mat, const VoigtVec9& Fbar,
                                       const Eigen::VectorXd& y);
/// Same for explicit Gauss-point deformation gradients (FOM fields).
std::vector<double> von_mises_field(const Material& mat, const std::vector<VoigtVec9>& F);

struct StressFieldComparison {
  std::vector<double> rom;
  std::vector<double> fom;
  std::vector<double> abs_error;
  double max_error_hotspots = 0.0;  ///< max |rom - fom| / fom over the top decile of fom
  double max_fom = 0.0;
};

StressFieldComparison compare_stress_fields(const std::vector<double>& rom, const std::vector<double>& fom);

}  // namespace strainrom
