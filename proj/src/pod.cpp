// SPDX-License-Identifier: Apache-2.0
#include "strainrom/pod.hpp"

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

constexpr double kRankTol = 1e-12;

Eigen::VectorXd singular_values(const Eigen::MatrixXd& X) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X);
  return svd.singularValues();
}

}  // namespace

int numerical_rank(const Eigen::MatrixXd& fluctuations) {
  if (fluctuations.size() == 0) return 0;
  const Eigen::VectorXd s = singular_values(fluctuations);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  while (r < s.size() && s(r) / s(0) >= kRankTol) ++r;
  return r;
}

ModeBasis compute_basis(const Eigen::MatrixXd& X, int d) {
  const Eigen::Index max_d = std::min(X.rows(), X.cols());
  if (d < 1 || d > max_d)
    raise(ErrorKind::RankDeficient, fmt::format("requested {} modes from a {}x{} snapshot matrix", d, X.rows(), X.cols()));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(d - 1) / s(0) < kRankTol)
    raise(ErrorKind::RankDeficient,
          fmt::format("mode {} is below the numerical rank (sigma_d/sigma_1 = {:.3e})", d, s(0) > 0.0 ? s(d - 1) / s(0) : 0.0));

  ModeBasis basis;
  basis.psi = svd.matrixU().leftCols(d);
  basis.sigma = s.head(d);
  for (int k = 0; k < d; ++k) {
    Eigen::Index imax = 0;
    basis.psi.col(k).cwiseAbs().maxCoeff(&imax);
    if (basis.psi(imax, k) < 0.0) basis.psi.col(k) *= -1.0;
  }
  return basis;
}

ModeBasis compute_basis(const SnapshotSet& set, int d) { return compute_basis(set.fluctuations(), d); }

Eigen::MatrixXd reduced_coords(const ModeBasis& basis, const Eigen::MatrixXd& fluctuations) {
  if (fluctuations.rows() != basis.psi.rows())
    raise(ErrorKind::DimensionMismatch,
          fmt::format("basis has {} rows, snapshots have {}", basis.psi.rows(), fluctuations.rows()));
  return basis.psi.transpose() * fluctuations;
}

Eigen::MatrixXd reduced_coords(const ModeBasis& basis, const SnapshotSet& set) {
  return reduced_coords(basis, set.fluctuations());
}

std::vector<VoigtVec9> reconstruct_field(const ModeBasis& basis, const Eigen::VectorXd& y, const VoigtVec9& Fbar) {
  if (y.size() != basis.d())
    raise(ErrorKind::DimensionMismatch, fmt::format("y has {} entries, basis has {} modes", y.size(), basis.d()));
  const Eigen::VectorXd f = basis.psi * y;
  std::vector<VoigtVec9> F(static_cast<std::size_t>(basis.n_gauss()));
  for (Eigen::Index g = 0; g < basis.n_gauss(); ++g) F[g] = Fbar + f.segment<9>(9 * g);
  return F;
}

double projection_error(const ModeBasis& basis, const Eigen::MatrixXd& X) {
  const double n = X.norm();
  if (n == 0.0) return 0.0;
  return (X - basis.psi * (basis.psi.transpose() * X)).norm() / n;
}

}  // namespace strainrom
