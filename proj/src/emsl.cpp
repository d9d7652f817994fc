// SPDX-License-Identifier: Apache-2.0
#include "strainrom/emsl.hpp"

#include <chrono>
#include <iostream>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

LinearMapFit fit_linear_map(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Fbar) {
  if (Fbar.rows() != 9 || Y.cols() != Fbar.cols())
    raise(ErrorKind::DimensionMismatch, fmt::format("Y is {}x{}, Fbar is {}x{}", Y.rows(), Y.cols(), Fbar.rows(), Fbar.cols()));
  if (Fbar.cols() < 9)
    raise(ErrorKind::RankDeficientParameters, fmt::format("{} snapshots cannot span 9 strain directions", Fbar.cols()));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Fbar.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  LinearMapFit fit;
  if (!(s(0) > 0.0) || s(8) / s(0) < 1e-12)
    raise(ErrorKind::RankDeficientParameters, "sampled macroscopic strains span fewer than 9 directions");
  fit.condition = (s(0) / s(8)) * (s(0) / s(8));

  if (fit.condition > 1e12) {
    const Eigen::MatrixXd G = Fbar * Fbar.transpose();
    const double lambda = 1e-12 * G.trace();
    fit.M = (G + lambda * Eigen::MatrixXd::Identity(9, 9)).ldlt().solve(Fbar * Y.transpose()).transpose();
    fit.regularized = true;
    std::cerr << fmt::format("warning: Fbar Fbar^T has condition {:.3e}, Tikhonov {:.3e} added\n", fit.condition, lambda);
  } else {
    fit.M = svd.solve(Y.transpose()).transpose();
  }
  fit.residual = (Y - fit.M * Fbar).norm();
  return fit;
}

EmslModel emsl_offline(const ModeBasis& basis, const ClusterPartition& partition, const Eigen::VectorXd& volumes,
                       const Eigen::MatrixXd& M, double cell_volume) {
  const int d = basis.d();
  const int m = partition.m();
  if (volumes.size() != basis.n_gauss() || static_cast<Eigen::Index>(partition.assignment.size()) != basis.n_gauss())
    raise(ErrorKind::DimensionMismatch, "partition does not cover the basis Gauss points");
  if (M.rows() != d || M.cols() != 9) raise(ErrorKind::DimensionMismatch, "linear map must be d x 9");

  EmslModel model;
  model.d = d;
  model.cell_volume = cell_volume;
  model.M = M;
  model.xi = partition.xi;
  model.psi = partition.psi;
  model.psi_bar = partition.psi_bar;
  model.D.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(9 * d, 9 * d));

  const Eigen::MatrixXd X = flatten_slices(basis);
  for (Eigen::Index g = 0; g < basis.n_gauss(); ++g)
    model.D[partition.assignment[g]].selfadjointView<Eigen::Lower>().rankUpdate(X.col(g), volumes(g));
  for (auto& Dc : model.D) Dc.triangularView<Eigen::StrictlyUpper>() = Dc.transpose();
  emsl_prepare(model);
  return model;
}

void emsl_prepare(EmslModel& model) {
  const int d = model.d;
  const int m = model.m();
  if (static_cast<int>(model.psi.size()) != m || static_cast<int>(model.psi_bar.size()) != m ||
      static_cast<int>(model.D.size()) != m)
    raise(ErrorKind::DimensionMismatch, "EMSL model arrays disagree on the cluster count");
  model.Psi.resize(9 * m, d);
  model.PsiBar.resize(9 * m, d);
  model.B_sym.setZero(d * (d + 1) / 2, 45 * m);
  model.B_skew.setZero(d * (d - 1) / 2, 36 * m);
  for (int c = 0; c < m; ++c) {
    model.Psi.middleRows<9>(9 * c) = model.psi[c];
    model.PsiBar.middleRows<9>(9 * c) = model.psi_bar[c];
    const Eigen::MatrixXd& Dc = model.D[c];
    if (Dc.rows() != 9 * d || Dc.cols() != 9 * d) raise(ErrorKind::DimensionMismatch, "D^c must be 9d x 9d");
    int ps = 45 * c;
    int pk = 36 * c;
    for (int g = 0; g < 9; ++g)
      for (int h = g; h < 9; ++h) {
        const auto blk = Dc.block(g * d, h * d, d, d);
        int qs = 0;
        int qk = 0;
        for (int beta = 0; beta < d; ++beta)
          for (int alpha = 0; alpha <= beta; ++alpha) {
            model.B_sym(qs++, ps) = g == h ? blk(alpha, beta) : blk(alpha, beta) + blk(beta, alpha);
            if (alpha < beta && g != h) model.B_skew(qk++, pk) = blk(alpha, beta) - blk(beta, alpha);
          }
        ++ps;
        if (g != h) ++pk;
      }
  }
}

Reference reference_at(const EmslModel& model, const VoigtVec9& Fbar, const Eigen::VectorXd& ybar) {
  Reference ref;
  ref.ybar = ybar;
  ref.F.resize(model.psi.size());
  for (std::size_t c = 0; c < model.psi.size(); ++c) {
    ref.F[c] = Fbar + model.psi[c] * ybar;
    if (!(voigt_decode(ref.F[c]).determinant() > 0.0))
      raise(ErrorKind::ReferenceInverted, fmt::format("reference strain of cluster {} is inverted", c));
  }
  return ref;
}

Reference predict_reference(const EmslModel& model, const VoigtVec9& Fbar) {
  return reference_at(model, Fbar, model.M * Fbar);
}

EmslSystem emsl_assemble(const EmslModel& model, const std::vector<VoigtVec9>& P, const std::vector<VoigtMat9>& A,
                         const Eigen::VectorXd& ybar) {
  const int d = model.d;
  const int m = model.m();
  if (static_cast<int>(P.size()) != m || static_cast<int>(A.size()) != m || ybar.size() != d)
    raise(ErrorKind::DimensionMismatch, "samples do not match the model clusters");
  if (!model.prepared()) {
    EmslModel local = model;
    emsl_prepare(local);
    return emsl_assemble(local, P, A, ybar);
  }

  const Eigen::VectorXd psi_y = model.Psi * ybar;
  Eigen::VectorXd Phat(9 * m);
  Eigen::MatrixXd A_row(9, 9 * m);
  Eigen::VectorXd sym(45 * m);
  Eigen::VectorXd skew(36 * m);
  bool has_skew = false;

  EmslSystem sys;
  for (int c = 0; c < m; ++c) {
    const VoigtMat9& Ac = A[c];
    Phat.segment<9>(9 * c) = P[c] - Ac * psi_y.segment<9>(9 * c);
    sys.c += model.xi(c) * Phat.segment<9>(9 * c);
    sys.A_voigt += model.xi(c) * Ac;
    A_row.middleCols<9>(9 * c) = Ac;
    int ps = 45 * c;
    int pk = 36 * c;
    for (int g = 0; g < 9; ++g) {
      sym(ps++) = Ac(g, g);
      for (int h = g + 1; h < 9; ++h) {
        sym(ps++) = 0.5 * (Ac(g, h) + Ac(h, g));
        const double k = 0.5 * (Ac(g, h) - Ac(h, g));
        has_skew = has_skew || k != 0.0;
        skew(pk++) = k;
      }
    }
  }
  sys.a.noalias() = model.PsiBar.transpose() * Phat;
  sys.D.noalias() = A_row * model.PsiBar;

  const Eigen::VectorXd upper = model.B_sym * sym;
  sys.B.resize(d, d);
  int q = 0;
  for (int beta = 0; beta < d; ++beta)
    for (int alpha = 0; alpha <= beta; ++alpha, ++q) sys.B(alpha, beta) = sys.B(beta, alpha) = upper(q);
  if (has_skew && d > 1) {
    const Eigen::VectorXd strict = model.B_skew * skew;
    q = 0;
    for (int beta = 0; beta < d; ++beta)
      for (int alpha = 0; alpha < beta; ++alpha, ++q) {
        sys.B(alpha, beta) += strict(q);
        sys.B(beta, alpha) -= strict(q);
      }
  }
  return sys;
}

namespace {

void solve_pass(const EmslModel& model, const Material& mat, const Eigen::VectorXd& y_prev, const Reference& ref,
                EmslStepResult& out) {
  std::vector<VoigtVec9> P(ref.F.size());
  std::vector<VoigtMat9> A(ref.F.size());
  for (std::size_t c = 0; c < ref.F.size(); ++c) {
    auto [Pc, Ac] = evaluate(mat, ref.F[c]);
    P[c] = Pc;
    A[c] = Ac;
  }
  out.system = emsl_assemble(model, P, A, ref.ybar);
  const EmslSystem& sys = out.system;

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(model.d, 9);
  out.y = y_prev;
  if (model.d > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.B);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14))
      raise(ErrorKind::SingularReducedSystem, fmt::format("reduced stiffness is singular (rcond {:.3e})", ldlt.rcond()));
    out.y += ldlt.solve(-sys.residual(y_prev));
    X = ldlt.solve(-sys.D.transpose());
  }
  out.ybar = ref.ybar;
  out.F = ref.F;
  out.Pbar = (sys.c + sys.D * out.y) / model.cell_volume;
  out.Abar_voigt = sys.A_voigt / model.cell_volume;
  out.Abar = (sys.A_voigt + sys.D * X) / model.cell_volume;
}

Eigen::VectorXd start_vector(const EmslModel& model, const Eigen::VectorXd& y_prev) {
  return y_prev.size() == model.d ? y_prev : Eigen::VectorXd::Zero(model.d);
}

}  // namespace

EmslStepResult emsl_step(const EmslModel& model, const Material& mat, const VoigtVec9& Fbar,
                         const Eigen::VectorXd& y_prev) {
  const auto t0 = std::chrono::steady_clock::now();
  EmslStepResult out;
  solve_pass(model, mat, start_vector(model, y_prev), predict_reference(model, Fbar), out);
  out.passes = 1;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

EmslStepResult emsl_fixed_point(const EmslModel& model, const Material& mat, const VoigtVec9& Fbar,
                                const Eigen::VectorXd& y_prev, int max_passes, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXd y0 = start_vector(model, y_prev);
  EmslStepResult out;
  solve_pass(model, mat, y0, predict_reference(model, Fbar), out);
  out.passes = 1;
  while (out.passes < max_passes) {
    const Eigen::VectorXd y_old = out.y;
    solve_pass(model, mat, y0, reference_at(model, Fbar, y_old), out);
    ++out.passes;
    if ((out.y - y_old).norm() <= tol * out.y.norm()) break;
    if (out.passes == max_passes) out.stalled = true;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

EmslTraining train_emsl(const ModeBasis& basis, const SnapshotSet& set, const EmslOptions& options) {
  EmslTraining t;
  t.partition = cluster_gauss_points(basis, set.volumes, options.m, options.seed);
  t.map = fit_linear_map(reduced_coords(basis, set), set.Fbar);
  t.model = emsl_offline(basis, t.partition, set.volumes, t.map.M, set.cell_volume);
  return t;
}

}  // namespace strainrom
