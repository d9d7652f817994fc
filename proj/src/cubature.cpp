// SPDX-License-Identifier: Apache-2.0
#include "strainrom/cubature.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

// Stacked view of the model: Psi is 9m x d, so F = Fbar + Psi y in one product.
struct PointFields {
  Eigen::MatrixXd Psi;
  Eigen::VectorXd P;             // 9m
  std::vector<VoigtMat9> A;
};

Eigen::MatrixXd stack_slices(const std::vector<ModeSlice>& psi, int d) {
  Eigen::MatrixXd out(9 * static_cast<Eigen::Index>(psi.size()), d);
  for (std::size_t c = 0; c < psi.size(); ++c) out.middleRows<9>(9 * static_cast<Eigen::Index>(c)) = psi[c];
  return out;
}

void sample_into(PointFields& f, const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                 const VoigtVec9& Fbar) {
  if (y.size() != model.d)
    raise(ErrorKind::DimensionMismatch, fmt::format("y has {} entries, model has d = {}", y.size(), model.d));
  const Eigen::Index m = model.m();
  f.P.resize(9 * m);
  f.A.resize(static_cast<std::size_t>(m));
  const Eigen::VectorXd Fs = f.Psi * y;
  for (Eigen::Index c = 0; c < m; ++c) {
    auto [P, A] = evaluate(mat, Fbar + Fs.segment<9>(9 * c));
    f.P.segment<9>(9 * c) = P;
    f.A[c] = A;
  }
}

PointFields sample(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y, const VoigtVec9& Fbar) {
  PointFields f;
  f.Psi = stack_slices(model.psi, model.d);
  sample_into(f, model, mat, y, Fbar);
  return f;
}

Eigen::VectorXd residual_of(const CubatureModel& model, const PointFields& f) {
  Eigen::VectorXd wP(f.P.size());
  for (Eigen::Index c = 0; c < model.m(); ++c) wP.segment<9>(9 * c) = model.xi(c) * f.P.segment<9>(9 * c);
  return f.Psi.transpose() * wP;
}

// W = blockdiag(w_c A^c) Psi, so K = Psi^T W and L^T = sum_c w_c A^c.
Eigen::MatrixXd weighted_stiffness_times_psi(const CubatureModel& model, const PointFields& f) {
  Eigen::MatrixXd W(f.Psi.rows(), model.d);
  for (Eigen::Index c = 0; c < model.m(); ++c)
    W.middleRows<9>(9 * c).noalias() = (model.xi(c) * f.A[c]) * f.Psi.middleRows<9>(9 * c);
  return W;
}

Eigen::MatrixXd tangent_of(const CubatureModel& model, const PointFields& f) {
  if (model.m() == 0) return Eigen::MatrixXd::Zero(model.d, model.d);
  return f.Psi.transpose() * weighted_stiffness_times_psi(model, f);
}

VoigtVec9 homogenize_of(const CubatureModel& model, const PointFields& f) {
  const Eigen::VectorXd& w = model.homog_weights();
  VoigtVec9 Pbar = VoigtVec9::Zero();
  for (Eigen::Index c = 0; c < model.m(); ++c) Pbar += w(c) * f.P.segment<9>(9 * c);
  return Pbar / model.cell_volume;
}

VoigtMat9 tangent_from(const CubatureModel& model, const PointFields& f, const Eigen::MatrixXd& K) {
  const Eigen::VectorXd& w = model.homog_weights();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(model.d, 9);
  for (Eigen::Index c = 0; c < model.m(); ++c)
    L.noalias() += f.Psi.middleRows<9>(9 * c).transpose() * (model.xi(c) * f.A[c]);

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(model.d, 9);
  if (model.d > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) raise(ErrorKind::SingularTangent, "reduced tangent is singular");
    X = -lu.solve(L);
  }
  VoigtMat9 Abar = VoigtMat9::Zero();
  for (Eigen::Index c = 0; c < model.m(); ++c) {
    const VoigtMat9 wA = w(c) * f.A[c];
    Abar.noalias() += wA;
    Abar.noalias() += wA * (f.Psi.middleRows<9>(9 * c) * X);
  }
  return Abar / model.cell_volume;
}

}  // namespace

CubatureModel full_integration_model(const ModeBasis& basis, const Eigen::VectorXd& volumes, double cell_volume) {
  if (volumes.size() != basis.n_gauss()) raise(ErrorKind::DimensionMismatch, "one volume per Gauss point is required");
  CubatureModel m;
  m.kind = "POD-FULL";
  m.d = basis.d();
  m.cell_volume = cell_volume;
  m.xi = volumes;
  for (Eigen::Index g = 0; g < basis.n_gauss(); ++g) {
    m.psi.push_back(basis.slice(g));
    m.gauss_index.push_back(static_cast<int>(g));
  }
  return m;
}

CubatureModel cluster_model(const ClusterPartition& partition, double cell_volume) {
  CubatureModel m;
  m.kind = "E3C";
  m.psi = partition.psi;
  m.xi = partition.xi;
  m.cell_volume = cell_volume;
  m.d = partition.psi.empty() ? 0 : static_cast<int>(partition.psi.front().cols());
  return m;
}

Eigen::VectorXd reduced_residual(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                                 const VoigtVec9& Fbar) {
  return residual_of(model, sample(model, mat, y, Fbar));
}

Eigen::MatrixXd reduced_tangent(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                                const VoigtVec9& Fbar) {
  return tangent_of(model, sample(model, mat, y, Fbar));
}

RomSolution newton_solve(const CubatureModel& model, const Material& mat, const VoigtVec9& Fbar,
                         const Eigen::VectorXd& y0, const RomOptions& options, bool with_tangent) {
  RomSolution s;
  s.y = y0.size() == model.d ? y0 : Eigen::VectorXd::Zero(model.d);
  const double tol_abs = options.tol_abs_factor * mat.E * model.cell_volume;
  double r0 = -1.0;
  PointFields f;
  f.Psi = stack_slices(model.psi, model.d);
  for (;;) {
    try {
      sample_into(f, model, mat, s.y, Fbar);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NonPositiveJacobian) throw;
      raise(ErrorKind::RomDivergence, fmt::format("after {} iterations: {}", s.iterations, err.what()));
    }
    const Eigen::VectorXd r = residual_of(model, f);
    const double rn = r.norm();
    if (r0 < 0.0) r0 = rn;
    if (!std::isfinite(rn))
      raise(ErrorKind::RomDivergence, fmt::format("non-finite residual after {} iterations", s.iterations));
    const bool done = rn <= std::max(tol_abs, options.tol_rel * r0);
    if (done) {
      s.Pbar = homogenize_of(model, f);
      if (with_tangent) s.Abar = tangent_from(model, f, tangent_of(model, f));
      return s;
    }
    if (s.iterations >= options.max_iter)
      raise(ErrorKind::RomDivergence,
            fmt::format("no convergence after {} iterations (|r| = {:.3e}, |r0| = {:.3e})", s.iterations, rn, r0));
    const Eigen::MatrixXd K = tangent_of(model, f);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    Eigen::VectorXd dy;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      dy = ldlt.solve(r);
    } else {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
      if (!lu.isInvertible()) raise(ErrorKind::RomDivergence, fmt::format("singular reduced tangent at iteration {}", s.iterations));
      dy = lu.solve(r);
    }
    s.y -= dy;
    ++s.iterations;
  }
}

VoigtVec9 rom_homogenize(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                         const VoigtVec9& Fbar) {
  return homogenize_of(model, sample(model, mat, y, Fbar));
}

VoigtMat9 rom_macro_tangent(const CubatureModel& model, const Material& mat, const Eigen::VectorXd& y,
                            const VoigtVec9& Fbar) {
  const PointFields f = sample(model, mat, y, Fbar);
  return tangent_from(model, f, tangent_of(model, f));
}

}  // namespace strainrom
