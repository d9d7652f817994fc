// SPDX-License-Identifier: Apache-2.0
#include "strainrom/ecm.hpp"

#include <cmath>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

double default_volume_penalty(const SnapshotSet& set) {
  const double bn = (set.cell_volume * set.Pbar).norm();
  const double root = bn / set.cell_volume;
  return root * root;
}

NnlsSystem assemble_nnls_system(const SnapshotSet& set, const ModeBasis& basis, double p_vol) {
  if (!set.has_stresses()) raise(ErrorKind::MissingStressSnapshots, "ECM training needs Gauss-point stress snapshots");
  if (basis.n_gauss() != set.n_gauss())
    raise(ErrorKind::DimensionMismatch,
          fmt::format("basis has {} Gauss points, snapshots have {}", basis.n_gauss(), set.n_gauss()));

  NnlsSystem sys;
  sys.d = basis.d();
  sys.s = static_cast<int>(set.cols());
  sys.p_vol = p_vol < 0.0 ? default_volume_penalty(set) : p_vol;
  const double root = std::sqrt(sys.p_vol);
  const Eigen::Index ds = sys.volume_row();
  const Eigen::Index rows = ds + 1 + 9 * static_cast<Eigen::Index>(sys.s);
  const Eigen::Index G = set.n_gauss();

  sys.A.resize(rows, G);
  for (Eigen::Index g = 0; g < G; ++g) {
    const ModeSlice psi = basis.slice(g);
    auto col = sys.A.col(g);
    for (int j = 0; j < sys.s; ++j) {
      const VoigtVec9 P = set.P.col(j).segment<9>(9 * g);
      col.segment(static_cast<Eigen::Index>(j) * sys.d, sys.d) = psi.transpose() * P;
      col.segment<9>(ds + 1 + 9 * static_cast<Eigen::Index>(j)) = P;
    }
    col(ds) = root;
  }
  sys.b = sys.A * set.volumes;
  // Stress rows target the stored homogenised stress; the work rows keep the
  // full-integration value, which is ~0 for converged snapshots.
  for (int j = 0; j < sys.s; ++j)
    sys.b.segment<9>(ds + 1 + 9 * static_cast<Eigen::Index>(j)) = set.cell_volume * set.Pbar.col(j);
  return sys;
}

CubatureModel build_ecm_model(const Eigen::VectorXd& weights, const ModeBasis& basis, double cell_volume) {
  if (weights.size() != basis.n_gauss()) raise(ErrorKind::DimensionMismatch, "one weight per Gauss point is required");
  CubatureModel m;
  m.kind = "ECM";
  m.d = basis.d();
  m.cell_volume = cell_volume;
  std::vector<double> xi;
  for (Eigen::Index g = 0; g < weights.size(); ++g) {
    if (!(weights(g) > 0.0)) continue;
    m.psi.push_back(basis.slice(g));
    m.gauss_index.push_back(static_cast<int>(g));
    xi.push_back(weights(g));
  }
  if (xi.empty()) raise(ErrorKind::EmptySelection, "no integration point received a positive weight");
  m.xi = Eigen::Map<Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
  return m;
}

EcmTraining train_ecm(const SnapshotSet& set, const ModeBasis& basis, const EcmOptions& options) {
  const NnlsSystem sys = assemble_nnls_system(set, basis, options.p_vol);
  EcmTraining t;
  t.p_vol = sys.p_vol;
  t.nnls = lawson_hanson_nnls(sys.A, sys.b, options.m, options.tol);
  t.model = build_ecm_model(t.nnls.x, basis, set.cell_volume);

  if (options.separate_homog_weights) {
    const Eigen::Index first = sys.volume_row();
    const Eigen::Index rows = sys.A.rows() - first;
    Eigen::MatrixXd H(rows, t.model.m());
    for (int c = 0; c < t.model.m(); ++c) H.col(c) = sys.A.col(t.model.gauss_index[c]).tail(rows);
    const NnlsResult h = lawson_hanson_nnls(H, sys.b.tail(rows), t.model.m(), options.tol);
    t.model.xi_hom = h.x;
  }
  return t;
}

}  // namespace strainrom
