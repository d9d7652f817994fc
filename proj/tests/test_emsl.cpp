// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "strainrom/cubature.hpp"
#include "strainrom/emsl.hpp"
#include "strainrom/error.hpp"
#include "support.hpp"

using namespace strainrom;
using namespace testing;

namespace {

struct Fixture {
  Mesh mesh = porous_cell();
  SnapshotSet set = small_snapshots(mesh, neo_hooke(), 4, 4, 17);
  ModeBasis basis = compute_basis(set, 5);
};

// B, a, D and c summed point by point from the basis and the partition.
struct BruteSystem {
  Eigen::MatrixXd B;
  Eigen::VectorXd a;
  Eigen::MatrixXd D;
  VoigtVec9 c;
};

BruteSystem brute_system(const ModeBasis& basis, const ClusterPartition& part, const Eigen::VectorXd& V,
                         const std::vector<VoigtVec9>& P, const std::vector<VoigtMat9>& A, const Eigen::VectorXd& ybar) {
  const int d = basis.d();
  BruteSystem s{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(9, d), VoigtVec9::Zero()};
  for (Eigen::Index g = 0; g < basis.n_gauss(); ++g) {
    const int c = part.assignment[g];
    const ModeSlice psi = basis.slice(g);
    const VoigtVec9 Phat = P[c] - A[c] * part.psi[c] * ybar;
    s.B += psi.transpose() * A[c] * psi * V(g);
    s.a += psi.transpose() * Phat * V(g);
    s.D += A[c] * psi * V(g);
    s.c += Phat * V(g);
  }
  return s;
}

}  // namespace

TEST_CASE("linear map solves the normal equations") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd Fbar = random_matrix(rng, 9, 30);
  const Eigen::MatrixXd Y = random_matrix(rng, 4, 30);
  const LinearMapFit fit = fit_linear_map(Y, Fbar);
  const Eigen::MatrixXd normal = (Fbar * Fbar.transpose()).ldlt().solve(Fbar * Y.transpose()).transpose();
  CHECK((fit.M - normal).norm() < 1e-10 * normal.norm());
  CHECK(!fit.regularized);
  CHECK(fit.residual == doctest::Approx((Y - fit.M * Fbar).norm()).epsilon(1e-12));

  const Eigen::MatrixXd M0 = random_matrix(rng, 4, 9);
  CHECK((fit_linear_map(M0 * Fbar, Fbar).M - M0).norm() < 1e-10);

  auto kind = [](const Eigen::MatrixXd& y, const Eigen::MatrixXd& f) {
    try {
      fit_linear_map(y, f);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind(Y.leftCols(8), Fbar.leftCols(8)) == ErrorKind::RankDeficientParameters);
  Eigen::MatrixXd flat = Fbar;
  flat.row(8) = flat.row(0);
  CHECK(kind(Y, flat) == ErrorKind::RankDeficientParameters);
  CHECK(kind(Y.leftCols(10), Fbar) == ErrorKind::DimensionMismatch);
}

TEST_CASE("cluster Gram operators") {
  Fixture fx;
  const ClusterPartition part = cluster_gauss_points(fx.basis, fx.set.volumes, 6, 1);
  const EmslModel model = emsl_offline(fx.basis, part, fx.set.volumes, Eigen::MatrixXd::Zero(5, 9), fx.set.cell_volume);
  REQUIRE(model.prepared());
  const int d = 5;
  Eigen::MatrixXd gram_all = Eigen::MatrixXd::Zero(d, d);
  for (int c = 0; c < 6; ++c) {
    const Eigen::MatrixXd& D = model.D[c];
    CHECK(D.rows() == 9 * d);
    CHECK((D - D.transpose()).norm() == 0.0);
    // Identity contraction: sum_gamma D(gamma a, gamma b) = sum_g V^g (psi^gT psi^g)(a, b).
    Eigen::MatrixXd contracted = Eigen::MatrixXd::Zero(d, d), direct = Eigen::MatrixXd::Zero(d, d);
    for (int gamma = 0; gamma < 9; ++gamma) contracted += D.block(gamma * d, gamma * d, d, d);
    for (Eigen::Index g = 0; g < fx.basis.n_gauss(); ++g)
      if (part.assignment[g] == c) direct += fx.basis.slice(g).transpose() * fx.basis.slice(g) * fx.set.volumes(g);
    CHECK((contracted - direct).norm() < 1e-13 * direct.norm());
    gram_all += direct;
    // Single entry.
    double e = 0.0;
    for (Eigen::Index g = 0; g < fx.basis.n_gauss(); ++g)
      if (part.assignment[g] == c) e += fx.basis.slice(g)(2, 1) * fx.basis.slice(g)(7, 3) * fx.set.volumes(g);
    CHECK(D(2 * d + 1, 7 * d + 3) == doctest::Approx(e).epsilon(1e-12));
  }
  // The basis is orthonormal in the plain inner product, not in the volume one.
  CHECK(gram_all.norm() > 0.0);
  CHECK(model.Psi.rows() == 54);
  CHECK(model.B_sym.rows() == 15);
  CHECK(model.B_skew.rows() == 10);
}

TEST_CASE("property: assembled system equals the point-wise sums") {
  Fixture fx;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 6; ++trial) {
    const int m = 1 + 3 * trial;
    const ClusterPartition part = cluster_gauss_points(fx.basis, fx.set.volumes, m, trial);
    const EmslModel model = emsl_offline(fx.basis, part, fx.set.volumes, Eigen::MatrixXd::Zero(5, 9), fx.set.cell_volume);
    std::vector<VoigtVec9> P;
    std::vector<VoigtMat9> A;
    for (int c = 0; c < m; ++c) {
      P.push_back(random_matrix(rng, 9, 1));
      // Odd trials use non-symmetric A so the skew operator is exercised.
      Eigen::MatrixXd a = random_matrix(rng, 9, 9);
      if (trial % 2 == 0) a = (a + a.transpose()).eval();
      A.push_back(a);
    }
    const Eigen::VectorXd ybar = random_matrix(rng, 5, 1);
    const EmslSystem sys = emsl_assemble(model, P, A, ybar);
    const BruteSystem ref = brute_system(fx.basis, part, fx.set.volumes, P, A, ybar);
    CHECK(rel_norm(sys.B, ref.B) < 1e-12);
    CHECK(rel_norm(sys.a, ref.a) < 1e-12);
    CHECK(rel_norm(sys.D, ref.D) < 1e-12);
    CHECK(rel_norm(sys.c, ref.c) < 1e-12);
    VoigtMat9 Av = VoigtMat9::Zero();
    for (int c = 0; c < m; ++c) Av += part.xi(c) * A[c];
    CHECK(rel_norm(sys.A_voigt, Av) < 1e-14);

    // An unprepared copy assembles the same system.
    EmslModel raw = model;
    raw.Psi.resize(0, 0);
    raw.B_sym.resize(0, 0);
    CHECK((emsl_assemble(raw, P, A, ybar).B - sys.B).norm() == 0.0);
  }
}

TEST_CASE("one step costs m material evaluations and ignores the previous y") {
  Fixture fx;
  const EmslTraining t = train_emsl(fx.basis, fx.set, EmslOptions{12, 1});
  VoigtVec9 Fbar = fx.set.Fbar.col(7);
  reset_material_evaluation_count();
  const EmslStepResult a = emsl_step(t.model, neo_hooke(), Fbar, Eigen::VectorXd::Zero(5));
  CHECK(material_evaluation_count() == 12);
  CHECK(a.passes == 1);
  const EmslStepResult b = emsl_step(t.model, neo_hooke(), Fbar, Eigen::VectorXd::Ones(5));
  CHECK((a.y - b.y).norm() < 1e-12 * a.y.norm());
  CHECK((a.system.residual(a.y)).norm() < 1e-10 * a.system.a.norm());
  CHECK(rel_norm(a.Pbar, VoigtVec9((a.system.c + a.system.D * a.y) / fx.set.cell_volume)) < 1e-14);
  CHECK((a.ybar - t.model.M * Fbar).norm() < 1e-14);

  reset_material_evaluation_count();
  const EmslStepResult fp = emsl_fixed_point(t.model, neo_hooke(), Fbar, Eigen::VectorXd::Zero(5), 4, 1e-14);
  CHECK(material_evaluation_count() == static_cast<std::uint64_t>(12 * fp.passes));
  CHECK(fp.passes >= 2);
}

TEST_CASE("a linear law is integrated exactly for any clustering") {
  const Mesh mesh = porous_cell();
  const SnapshotSet set = small_snapshots(mesh, linear_elastic(), 4, 3, 19);
  const ModeBasis basis = compute_basis(set, 6);
  const CubatureModel full = full_integration_model(basis, set.volumes, set.cell_volume);
  for (int m : {1, 3, 10}) {
    const EmslTraining t = train_emsl(basis, set, EmslOptions{m, 2});
    for (Eigen::Index j = 0; j < set.cols(); j += 3) {
      const VoigtVec9 Fbar = set.Fbar.col(j);
      const EmslStepResult e = emsl_step(t.model, linear_elastic(), Fbar, Eigen::VectorXd::Zero(6));
      const RomSolution r = newton_solve(full, linear_elastic(), Fbar, Eigen::VectorXd::Zero(6), RomOptions{}, true);
      CHECK((e.y - r.y).norm() < 1e-9 * r.y.norm());
      CHECK(rel_norm(e.Pbar, r.Pbar) < 1e-10);
      CHECK(rel_norm(e.Abar, r.Abar) < 1e-10);
    }
  }
}

TEST_CASE("failures") {
  Fixture fx;
  EmslTraining t = train_emsl(fx.basis, fx.set, EmslOptions{5, 1});
  auto kind = [&](const EmslModel& model, const VoigtVec9& Fbar) {
    try {
      emsl_step(model, neo_hooke(), Fbar, Eigen::VectorXd::Zero(5));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  VoigtVec9 inverted = voigt_identity();
  inverted(0) = -1.0;
  CHECK(kind(t.model, inverted) == ErrorKind::ReferenceInverted);
  EmslModel big = t.model;
  big.M *= 1e6;
  CHECK(kind(big, fx.set.Fbar.col(3)) == ErrorKind::ReferenceInverted);

  EmslModel flat = t.model;
  for (auto& D : flat.D) D.setZero();
  emsl_prepare(flat);
  CHECK(kind(flat, fx.set.Fbar.col(3)) == ErrorKind::SingularReducedSystem);

  EmslModel broken = t.model;
  broken.D.pop_back();
  CHECK_THROWS_AS(emsl_prepare(broken), Error);
}
