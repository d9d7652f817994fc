// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace strainrom {

// Nonsymmetric second-order tensors are flattened row-major:
//   index 3*i + J  <->  T_iJ,  i.e. [11,12,13,21,22,23,31,32,33].
// Every 9-vector and 9x9 matrix in the library follows this ordering.
using VoigtVec9 = Eigen::Matrix<double, 9, 1>;
using VoigtMat9 = Eigen::Matrix<double, 9, 9>;
using Tensor2 = Eigen::Matrix3d;

constexpr int voigt_index(int i, int J) noexcept { return 3 * i + J; }

VoigtVec9 voigt_encode(const Tensor2& T);
Tensor2 voigt_decode(const VoigtVec9& v);

/// Identity tensor in Voigt form.
VoigtVec9 voigt_identity();

}  // namespace strainrom
