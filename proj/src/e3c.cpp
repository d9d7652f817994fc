// SPDX-License-Identifier: Apache-2.0
#include "strainrom/e3c.hpp"

#include <limits>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

double default_strain_penalty(const Material& mat) { return mat.E * mat.E; }

E3cData make_e3c_data(const ModeBasis& basis, const SnapshotSet& set, const Eigen::VectorXd& xi, double p_strain) {
  E3cData data;
  data.material = set.material;
  const Eigen::MatrixXd Ft = set.fluctuations();
  data.Y = reduced_coords(basis, Ft);
  data.Fbar = set.Fbar;
  data.Pbar = set.Pbar;
  data.strain_target = Eigen::MatrixXd::Zero(9, set.cols());
  for (Eigen::Index g = 0; g < set.n_gauss(); ++g) data.strain_target += Ft.middleRows(9 * g, 9) * set.volumes(g);
  data.xi = xi;
  data.cell_volume = set.cell_volume;
  data.p_strain = p_strain < 0.0 ? default_strain_penalty(set.material) : p_strain;
  data.work_scale = 1.0 / (set.cell_volume * set.cell_volume);
  data.stress_scale = data.work_scale;
  data.strain_scale = data.work_scale;
  return data;
}

Eigen::VectorXd pack_design(const std::vector<ModeSlice>& psi) {
  if (psi.empty()) return {};
  const Eigen::Index n = psi.front().size();
  Eigen::VectorXd x(n * static_cast<Eigen::Index>(psi.size()));
  for (std::size_t c = 0; c < psi.size(); ++c)
    x.segment(n * static_cast<Eigen::Index>(c), n) = Eigen::Map<const Eigen::VectorXd>(psi[c].data(), n);
  return x;
}

std::vector<ModeSlice> unpack_design(const Eigen::VectorXd& x, int m, int d) {
  const Eigen::Index n = 9 * static_cast<Eigen::Index>(d);
  if (x.size() != n * m) raise(ErrorKind::DimensionMismatch, "design vector length does not match m * 9 * d");
  std::vector<ModeSlice> psi(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) psi[c] = Eigen::Map<const ModeSlice>(x.data() + n * c, 9, d);
  return psi;
}

double e3c_objective(const E3cData& data, const Eigen::VectorXd& x, Eigen::VectorXd* grad, E3cTerms* terms) {
  const int m = data.m(), d = data.d(), s = data.s();
  const std::vector<ModeSlice> psi = unpack_design(x, m, d);
  const Eigen::Index n = 9 * static_cast<Eigen::Index>(d);
  if (grad) grad->setZero(x.size());

  std::vector<VoigtVec9> P(static_cast<std::size_t>(m));
  std::vector<VoigtMat9> A(static_cast<std::size_t>(m));
  E3cTerms t;
  for (int j = 0; j < s; ++j) {
    const Eigen::VectorXd y = data.Y.col(j);
    const VoigtVec9 Fbar = data.Fbar.col(j);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    VoigtVec9 h = -data.cell_volume * data.Pbar.col(j);
    VoigtVec9 e = -data.strain_target.col(j);
    for (int c = 0; c < m; ++c) {
      const VoigtVec9 Fc = Fbar + psi[c] * y;
      try {
        auto [Pc, Ac] = evaluate(data.material, Fc);
        P[c] = Pc;
        A[c] = Ac;
      } catch (const Error& err) {
        raise(err.kind(), fmt::format("point {} snapshot {}: {}", c, j, err.what()));
      }
      w.noalias() += psi[c].transpose() * P[c] * data.xi(c);
      h += P[c] * data.xi(c);
      e += psi[c] * y * data.xi(c);
    }
    t.work += data.work_scale * w.squaredNorm();
    t.stress += data.stress_scale * h.squaredNorm();
    t.strain += data.strain_scale * data.p_strain * e.squaredNorm();

    if (!grad) continue;
    for (int c = 0; c < m; ++c) {
      const double xc = data.xi(c);
      const VoigtVec9 Apw = A[c].transpose() * (psi[c] * w);
      const VoigtVec9 Ath = A[c].transpose() * h;
      ModeSlice G = 2.0 * data.work_scale * xc * (P[c] * w.transpose() + Apw * y.transpose());
      G += 2.0 * data.stress_scale * xc * Ath * y.transpose();
      G += 2.0 * data.strain_scale * data.p_strain * xc * e * y.transpose();
      grad->segment(n * c, n) += Eigen::Map<const Eigen::VectorXd>(G.data(), n);
    }
  }
  if (terms) *terms = t;
  return t.total();
}

E3cTraining build_e3c_model(const ModeBasis& basis, const SnapshotSet& set, const E3cOptions& options) {
  E3cTraining out;
  out.partition = cluster_gauss_points(basis, set.volumes, options.m, options.seed);
  const E3cData data = make_e3c_data(basis, set, out.partition.xi, options.p_strain);
  const Eigen::VectorXd x0 = pack_design(out.partition.psi);
  e3c_objective(data, x0, nullptr, &out.initial);

  const Objective f = [&data](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    try {
      return e3c_objective(data, x, &g);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NonPositiveJacobian) throw;
      g.setZero(x.size());
      return std::numeric_limits<double>::infinity();
    }
  };
  out.optimizer = lbfgs_minimize(f, x0, options.lbfgs);
  e3c_objective(data, out.optimizer.x, nullptr, &out.corrected);

  out.model = cluster_model(out.partition, set.cell_volume);
  out.model.kind = "E3C";
  out.model.psi = unpack_design(out.optimizer.x, data.m(), data.d());
  return out;
}

}  // namespace strainrom
