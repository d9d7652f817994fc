// SPDX-License-Identifier: Apache-2.0
// Independent reference computations shared by unit tests and the acceptance run.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "strainrom/fom.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/sampling.hpp"

namespace testing {

using namespace strainrom;

/// FOM runs that keep the displacement fluctuations next to the strains.
struct DisplacementSnapshots {
  Eigen::MatrixXd U;   ///< dofs x s
  Eigen::MatrixXd Ft;  ///< 9|G| x s strain fluctuations
  Eigen::MatrixXd Fbar;
  Eigen::MatrixXd Pbar;
};

inline DisplacementSnapshots displacement_snapshots(FomSolver& solver, const std::vector<LoadPath>& paths) {
  std::vector<FomState> states;
  for (const auto& path : paths) {
    FomState s = solver.reference_state();
    for (const auto& F : path.fbar) {
      s = solver.solve_increment(F, s);
      states.push_back(s);
    }
  }
  const auto n = static_cast<Eigen::Index>(states.size());
  DisplacementSnapshots out;
  out.U.resize(solver.dofs(), n);
  out.Ft.resize(9 * static_cast<Eigen::Index>(solver.gauss().size()), n);
  out.Fbar.resize(9, n);
  out.Pbar.resize(9, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const FomState& s = states[j];
    out.U.col(j) = s.u;
    Eigen::VectorXd F = gauss_strains(s);
    for (Eigen::Index g = 0; g < F.size() / 9; ++g) F.segment<9>(9 * g) -= s.Fbar;
    out.Ft.col(j) = F;
    out.Fbar.col(j) = s.Fbar;
    out.Pbar.col(j) = homogenize_stress(s, solver.gauss(), solver.cell_volume());
  }
  return out;
}

/// POD-Galerkin solution computed through the FOM assembly. The strain modes
/// psi = Ft V Sigma^-1 are the gradients of the displacement modes
/// Phi = U V Sigma^-1 = U Ft^T psi Sigma^-2, so Phi^T R(Phi y) is the reduced
/// residual without any Gauss-point slicing of psi.
class GalerkinOracle {
 public:
  GalerkinOracle(FomSolver& solver, const DisplacementSnapshots& snaps, const ModeBasis& basis)
      : solver_(solver) {
    const Eigen::VectorXd inv2 = basis.sigma.array().square().inverse();
    phi_ = snaps.U * (snaps.Ft.transpose() * basis.psi) * inv2.asDiagonal();
  }

  [[nodiscard]] const Eigen::MatrixXd& phi() const { return phi_; }

  Eigen::VectorXd residual(const Eigen::VectorXd& y, const VoigtVec9& Fbar) const {
    return phi_.transpose() * solver_.residual(stresses(y, Fbar));
  }

  /// Newton with a central-difference Jacobian; returns the homogenised stress.
  VoigtVec9 solve(const VoigtVec9& Fbar, Eigen::VectorXd& y, double tol) const {
    const Eigen::Index d = phi_.cols();
    Eigen::VectorXd r = residual(y, Fbar);
    const double r0 = std::max(r.norm(), 1e-300);
    for (int it = 0; it < 30 && r.norm() > tol * r0; ++it) {
      Eigen::MatrixXd J(d, d);
      const double h = 1e-7;
      for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXd yp = y, ym = y;
        yp(k) += h;
        ym(k) -= h;
        J.col(k) = (residual(yp, Fbar) - residual(ym, Fbar)) / (2 * h);
      }
      y -= J.fullPivLu().solve(r);
      r = residual(y, Fbar);
    }
    const auto P = stresses(y, Fbar);
    VoigtVec9 Pbar = VoigtVec9::Zero();
    for (std::size_t g = 0; g < P.size(); ++g) Pbar += P[g] * solver_.gauss().points[g].volume;
    return Pbar / solver_.cell_volume();
  }

 private:
  std::vector<VoigtVec9> stresses(const Eigen::VectorXd& y, const VoigtVec9& Fbar) const {
    std::vector<VoigtVec9> P;
    for (const auto& F : solver_.strains(phi_ * y, Fbar)) P.push_back(pk1_stress(solver_.material(), F));
    return P;
  }

  FomSolver& solver_;
  Eigen::MatrixXd phi_;
};

}  // namespace testing
