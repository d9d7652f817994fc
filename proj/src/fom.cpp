// SPDX-License-Identifier: Apache-2.0
#include "strainrom/fom.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

using StrainDisplacement = Eigen::Matrix<double, 9, 24>;

// Row (i,J), column (a,k): d_ik dN_a/dX_J.
StrainDisplacement strain_displacement(const GaussPoint& p) {
  StrainDisplacement B = StrainDisplacement::Zero();
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      for (int J = 0; J < 3; ++J) B(voigt_index(i, J), 3 * a + i) = p.dNdX(a, J);
  return B;
}

}  // namespace

FomSolver::FomSolver(Mesh mesh, Material material, FomOptions options)
    : mesh_(std::move(mesh)), material_(material), options_(options) {
  material_.validate();
  gauss_ = gauss_table(mesh_);
  periodic_ = periodic_pairs(mesh_);

  element_dofs_.resize(mesh_.elements.size());
  std::vector<Eigen::Triplet<double>> pattern;
  pattern.reserve(mesh_.elements.size() * 576);
  for (std::size_t e = 0; e < mesh_.elements.size(); ++e) {
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i)
        element_dofs_[e][3 * a + i] = periodic_.dof(periodic_.node_class[mesh_.elements[e][a]], i);
    for (int r : element_dofs_[e])
      for (int c : element_dofs_[e])
        if (r >= 0 && c >= 0) pattern.emplace_back(r, c, 0.0);
  }
  const int n = dofs();
  stiffness_.resize(n, n);
  stiffness_.setFromTriplets(pattern.begin(), pattern.end());
  stiffness_.makeCompressed();

  value_slot_.assign(mesh_.elements.size() * 576, -1);
  const double* base = stiffness_.valuePtr();
  for (std::size_t e = 0; e < mesh_.elements.size(); ++e)
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 24; ++c) {
        const int dr = element_dofs_[e][r], dc = element_dofs_[e][c];
        if (dr < 0 || dc < 0) continue;
        value_slot_[e * 576 + r * 24 + c] = static_cast<int>(&stiffness_.coeffRef(dr, dc) - base);
      }
}

FomState FomSolver::reference_state() const {
  FomState s;
  s.u = Eigen::VectorXd::Zero(dofs());
  s.Fbar = voigt_identity();
  s.F = strains(s.u, s.Fbar);
  s.P.resize(s.F.size());
  s.A.resize(s.F.size());
  for (std::size_t g = 0; g < s.F.size(); ++g) {
    auto [P, A] = evaluate(material_, s.F[g]);
    s.P[g] = P;
    s.A[g] = A;
  }
  s.converged = true;
  return s;
}

std::vector<VoigtVec9> FomSolver::strains(const Eigen::VectorXd& u, const VoigtVec9& Fbar) const {
  std::vector<VoigtVec9> F(gauss_.size());
  for (std::size_t g = 0; g < gauss_.size(); ++g) {
    const auto& p = gauss_.points[g];
    const auto& dofs = element_dofs_[p.element];
    VoigtVec9 f = Fbar;
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) {
        const int d = dofs[3 * a + i];
        if (d < 0) continue;
        for (int J = 0; J < 3; ++J) f(voigt_index(i, J)) += u(d) * p.dNdX(a, J);
      }
    F[g] = f;
  }
  return F;
}

Eigen::VectorXd FomSolver::residual(const std::vector<VoigtVec9>& P) const {
  Eigen::VectorXd R = Eigen::VectorXd::Zero(dofs());
  for (std::size_t g = 0; g < gauss_.size(); ++g) {
    const auto& p = gauss_.points[g];
    const auto& dofs = element_dofs_[p.element];
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) {
        const int d = dofs[3 * a + i];
        if (d < 0) continue;
        double v = 0.0;
        for (int J = 0; J < 3; ++J) v += P[g](voigt_index(i, J)) * p.dNdX(a, J);
        R(d) += v * p.volume;
      }
  }
  return R;
}

void FomSolver::assemble_stiffness(const std::vector<VoigtMat9>& A) {
  double* values = stiffness_.valuePtr();
  std::fill(values, values + stiffness_.nonZeros(), 0.0);
  for (std::size_t e = 0; e < mesh_.elements.size(); ++e) {
    Eigen::Matrix<double, 24, 24> Ke = Eigen::Matrix<double, 24, 24>::Zero();
    for (int q = 0; q < 8; ++q) {
      const std::size_t g = e * 8 + q;
      const auto& p = gauss_.points[g];
      const StrainDisplacement B = strain_displacement(p);
      Ke.noalias() += B.transpose() * (A[g] * B) * p.volume;
    }
    const int* slots = &value_slot_[e * 576];
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 24; ++c)
        if (slots[r * 24 + c] >= 0) values[slots[r * 24 + c]] += Ke(r, c);
  }
}

bool FomSolver::factorize() {
  if (!pattern_analyzed_) {
    solver_.analyzePattern(stiffness_);
    pattern_analyzed_ = true;
  }
  solver_.factorize(stiffness_);
  return solver_.info() == Eigen::Success;
}

FomState FomSolver::solve_increment(const VoigtVec9& Fbar, const FomState& prev) {
  if (!(voigt_decode(Fbar).determinant() > 0.0))
    raise(ErrorKind::NonPositiveJacobian, "macroscopic deformation gradient is inverted");

  FomState s;
  s.Fbar = Fbar;
  s.u = prev.u.size() == dofs() ? prev.u : Eigen::VectorXd::Zero(dofs());
  s.P.resize(gauss_.size());
  s.A.resize(gauss_.size());
  const double tol_abs = options_.tol_abs_factor * material_.E * cell_volume();
  double r0 = -1.0;

  for (;;) {
    s.F = strains(s.u, Fbar);
    try {
      for (std::size_t g = 0; g < gauss_.size(); ++g) {
        auto [P, A] = evaluate(material_, s.F[g]);
        s.P[g] = P;
        s.A[g] = A;
      }
    } catch (const Error& err) {
      raise(ErrorKind::NewtonDivergence, fmt::format("after {} corrections: {}", s.iterations, err.what()));
    }
    const Eigen::VectorXd R = residual(s.P);
    const double r = R.norm();
    s.residual_history.push_back(r);
    if (r0 < 0.0) r0 = r;
    if (r <= std::max(tol_abs, options_.tol_rel * r0)) {
      s.converged = true;
      return s;
    }
    if (s.iterations >= options_.max_iter || !std::isfinite(r))
      raise(ErrorKind::NewtonDivergence,
            fmt::format("no convergence after {} corrections (|R| = {:.3e}, |R0| = {:.3e})", s.iterations, r, r0));
    assemble_stiffness(s.A);
    if (!factorize())
      raise(ErrorKind::NewtonDivergence, fmt::format("singular stiffness after {} corrections", s.iterations));
    s.u -= solver_.solve(R);
    ++s.iterations;
  }
}

VoigtMat9 FomSolver::macro_tangent(const FomState& state) {
  assemble_stiffness(state.A);
  if (!factorize()) raise(ErrorKind::SingularTangent, "stiffness factorization failed");

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(dofs(), 9);
  for (std::size_t g = 0; g < gauss_.size(); ++g) {
    const auto& p = gauss_.points[g];
    const Eigen::Matrix<double, 24, 9> BtA = strain_displacement(p).transpose() * state.A[g] * p.volume;
    const auto& dofs = element_dofs_[p.element];
    for (int r = 0; r < 24; ++r)
      if (dofs[r] >= 0) L.row(dofs[r]) += BtA.row(r);
  }
  const Eigen::MatrixXd X = -solver_.solve(L);
  if (solver_.info() != Eigen::Success) raise(ErrorKind::SingularTangent, "sensitivity solve failed");

  VoigtMat9 Abar = VoigtMat9::Zero();
  for (std::size_t g = 0; g < gauss_.size(); ++g) {
    const auto& p = gauss_.points[g];
    const auto& dofs = element_dofs_[p.element];
    Eigen::Matrix<double, 24, 9> Xe = Eigen::Matrix<double, 24, 9>::Zero();
    for (int r = 0; r < 24; ++r)
      if (dofs[r] >= 0) Xe.row(r) = X.row(dofs[r]);
    const VoigtMat9 dF = VoigtMat9::Identity() + strain_displacement(p) * Xe;
    Abar.noalias() += state.A[g] * dF * p.volume;
  }
  return Abar / cell_volume();
}

VoigtVec9 homogenize_stress(const FomState& state, const GaussTable& gauss, double cell_volume) {
  VoigtVec9 Pbar = VoigtVec9::Zero();
  for (std::size_t g = 0; g < gauss.size(); ++g) Pbar += state.P[g] * gauss.points[g].volume;
  return Pbar / cell_volume;
}

namespace {
Eigen::VectorXd stack(const std::vector<VoigtVec9>& fields) {
  Eigen::VectorXd v(9 * static_cast<Eigen::Index>(fields.size()));
  for (std::size_t g = 0; g < fields.size(); ++g) v.segment<9>(9 * static_cast<Eigen::Index>(g)) = fields[g];
  return v;
}
}  // namespace

Eigen::VectorXd gauss_strains(const FomState& state) { return stack(state.F); }
Eigen::VectorXd gauss_stresses(const FomState& state) { return stack(state.P); }

}  // namespace strainrom
