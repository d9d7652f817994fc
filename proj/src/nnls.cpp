// SPDX-License-Identifier: Apache-2.0
#include "strainrom/nnls.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const std::vector<int>& P, const Eigen::VectorXd& b) {
  Eigen::MatrixXd AP(A.rows(), static_cast<Eigen::Index>(P.size()));
  for (std::size_t k = 0; k < P.size(); ++k) AP.col(static_cast<Eigen::Index>(k)) = A.col(P[k]);
  return AP.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult lawson_hanson_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int m_target, double tol) {
  if (m_target < 1) raise(ErrorKind::ConfigError, "NNLS target support must be at least 1");
  if (A.rows() != b.size()) raise(ErrorKind::DimensionMismatch, "NNLS matrix and right-hand side disagree");

  const Eigen::Index n = A.cols();
  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cn = A.col(j).norm();
    scale(j) = cn > 0.0 ? 1.0 / cn : 0.0;
  }
  const Eigen::MatrixXd As = A * scale.asDiagonal();

  NnlsResult out;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  std::vector<int> P;
  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  const double bn = b.norm();
  const double wtol = 1e-13 * std::max(bn, std::numeric_limits<double>::min());
  Eigen::VectorXd r = b;
  const int budget = 3 * static_cast<int>(n) + 10;

  for (;;) {
    const double rn = r.norm();
    out.residual_history.push_back(rn);
    if (rn <= tol * bn) {
      out.reached_tolerance = true;
      break;
    }
    if (static_cast<int>(P.size()) >= m_target) break;

    const Eigen::VectorXd w = As.transpose() * r;
    Eigen::Index jmax = -1;
    double wmax = wtol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && scale(j) > 0.0 && w(j) > wmax) {
        wmax = w(j);
        jmax = j;
      }
    if (jmax < 0) break;  // KKT point of the full problem

    if (++out.iterations > budget) raise(ErrorKind::StalledActiveSet, "active-set iteration budget exhausted");
    P.push_back(static_cast<int>(jmax));
    passive[jmax] = 1;

    for (;;) {
      const Eigen::VectorXd zP = solve_passive(As, P, b);
      bool feasible = true;
      for (Eigen::Index k = 0; k < zP.size(); ++k) feasible &= zP(k) > 0.0;
      if (feasible) {
        for (std::size_t k = 0; k < P.size(); ++k) z(P[k]) = zP(static_cast<Eigen::Index>(k));
        break;
      }
      if (zP(zP.size() - 1) <= 0.0 && P.size() == 1)
        raise(ErrorKind::StalledActiveSet, fmt::format("column {} has positive gradient but no descent", jmax));

      double alpha = 1.0;
      for (std::size_t k = 0; k < P.size(); ++k) {
        const double zk = z(P[k]), pk = zP(static_cast<Eigen::Index>(k));
        if (pk <= 0.0) alpha = std::min(alpha, zk / (zk - pk));
      }
      for (std::size_t k = 0; k < P.size(); ++k) z(P[k]) += alpha * (zP(static_cast<Eigen::Index>(k)) - z(P[k]));

      std::vector<int> keep;
      for (int j : P) {
        if (z(j) > 0.0 && !(z(j) <= 1e-15 * z.cwiseAbs().maxCoeff())) {
          keep.push_back(j);
        } else {
          z(j) = 0.0;
          passive[j] = 0;
        }
      }
      if (keep.empty() || std::find(keep.begin(), keep.end(), static_cast<int>(jmax)) == keep.end()) {
        if (++out.iterations > budget) raise(ErrorKind::StalledActiveSet, "active-set iteration budget exhausted");
      }
      P = keep;
      if (P.empty()) break;
    }
    r = b - As * z;
  }

  out.x = scale.cwiseProduct(z);
  for (int j : P)
    if (out.x(j) > 0.0) out.support.push_back(j);
  out.residual = (A * out.x - b).norm();
  return out;
}

}  // namespace strainrom
