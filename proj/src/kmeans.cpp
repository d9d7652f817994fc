// SPDX-License-Identifier: Apache-2.0
#include "strainrom/kmeans.hpp"

#include <limits>
#include <random>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

int nearest(const Eigen::MatrixXd& centroids, const Eigen::Ref<const Eigen::VectorXd>& x, double& dist2) {
  int best = 0;
  dist2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
    const double d2 = (centroids.col(c) - x).squaredNorm();
    if (d2 < dist2) {
      dist2 = d2;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& X, const Eigen::VectorXd& w, int m, std::mt19937_64& rng) {
  const Eigen::Index n = X.cols();
  Eigen::MatrixXd C(X.rows(), m);
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  std::discrete_distribution<Eigen::Index> first(w.data(), w.data() + n);
  Eigen::Index pick = first(rng);
  C.col(0) = X.col(pick);
  chosen[pick] = 1;

  Eigen::VectorXd d2(n);
  for (Eigen::Index g = 0; g < n; ++g) d2(g) = (X.col(g) - C.col(0)).squaredNorm();

  for (int c = 1; c < m; ++c) {
    Eigen::VectorXd p = w.cwiseProduct(d2);
    for (Eigen::Index g = 0; g < n; ++g)
      if (chosen[g]) p(g) = 0.0;
    if (p.sum() > 0.0) {
      std::discrete_distribution<Eigen::Index> next(p.data(), p.data() + n);
      pick = next(rng);
    } else {
      // All remaining points coincide with a centroid.
      pick = 0;
      while (pick < n && chosen[pick]) ++pick;
    }
    C.col(c) = X.col(pick);
    chosen[pick] = 1;
    for (Eigen::Index g = 0; g < n; ++g) d2(g) = std::min(d2(g), (X.col(g) - C.col(c)).squaredNorm());
  }
  return C;
}

}  // namespace

KMeansResult weighted_kmeans(const Eigen::MatrixXd& X, const Eigen::VectorXd& w, int m, std::uint64_t seed,
                             int max_iter) {
  const Eigen::Index n = X.cols();
  if (m < 1 || m > n) raise(ErrorKind::ConfigError, fmt::format("cannot form {} clusters from {} points", m, n));
  if (w.size() != n) raise(ErrorKind::DimensionMismatch, "one weight per point is required");
  if ((w.array() <= 0.0).any()) raise(ErrorKind::ConfigError, "k-means weights must be positive");

  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids = seed_plus_plus(X, w, m, rng);
  r.assignment.assign(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd dist2(n);

  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index g = 0; g < n; ++g) {
      const int c = nearest(r.centroids, X.col(g), dist2(g));
      changed |= c != r.assignment[g];
      r.assignment[g] = c;
    }

    std::vector<int> count(static_cast<std::size_t>(m), 0);
    for (int c : r.assignment) ++count[c];
    for (int c = 0; c < m; ++c) {
      if (count[c] > 0) continue;
      Eigen::Index far = -1;
      double best = -1.0;
      for (Eigen::Index g = 0; g < n; ++g)
        if (count[r.assignment[g]] > 1 && dist2(g) > best) {
          best = dist2(g);
          far = g;
        }
      if (far < 0) break;
      --count[r.assignment[far]];
      r.assignment[far] = c;
      ++count[c];
      dist2(far) = 0.0;
      changed = true;
    }

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(X.rows(), m);
    Eigen::VectorXd vol = Eigen::VectorXd::Zero(m);
    for (Eigen::Index g = 0; g < n; ++g) {
      sum.col(r.assignment[g]) += w(g) * X.col(g);
      vol(r.assignment[g]) += w(g);
    }
    for (int c = 0; c < m; ++c)
      if (vol(c) > 0.0) r.centroids.col(c) = sum.col(c) / vol(c);

    double obj = 0.0;
    for (Eigen::Index g = 0; g < n; ++g) obj += w(g) * (X.col(g) - r.centroids.col(r.assignment[g])).squaredNorm();
    r.objective.push_back(obj);
    r.iterations = it + 1;
    if (!changed) break;
  }
  return r;
}

Eigen::MatrixXd flatten_slices(const ModeBasis& basis) {
  const int d = basis.d();
  Eigen::MatrixXd X(9 * d, basis.n_gauss());
  for (Eigen::Index g = 0; g < basis.n_gauss(); ++g)
    for (int a = 0; a < 9; ++a)
      for (int i = 0; i < d; ++i) X(a * d + i, g) = basis.psi(9 * g + a, i);
  return X;
}

ClusterPartition partition_from_assignment(const ModeBasis& basis, const Eigen::VectorXd& volumes,
                                           const std::vector<int>& assignment, int m) {
  if (volumes.size() != basis.n_gauss() || static_cast<Eigen::Index>(assignment.size()) != basis.n_gauss())
    raise(ErrorKind::DimensionMismatch, "partition size does not match the basis");
  ClusterPartition p;
  p.assignment = assignment;
  p.xi = Eigen::VectorXd::Zero(m);
  p.psi_bar.assign(static_cast<std::size_t>(m), ModeSlice::Zero(9, basis.d()));
  for (Eigen::Index g = 0; g < basis.n_gauss(); ++g) {
    const int c = assignment[g];
    p.xi(c) += volumes(g);
    p.psi_bar[c] += basis.psi.middleRows(9 * g, 9) * volumes(g);
  }
  p.psi.resize(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    if (!(p.xi(c) > 0.0)) raise(ErrorKind::EmptySelection, fmt::format("cluster {} is empty", c));
    p.psi[c] = p.psi_bar[c] / p.xi(c);
  }
  return p;
}

ClusterPartition cluster_gauss_points(const ModeBasis& basis, const Eigen::VectorXd& volumes, int m,
                                      std::uint64_t seed) {
  const KMeansResult km = weighted_kmeans(flatten_slices(basis), volumes, m, seed);
  ClusterPartition p = partition_from_assignment(basis, volumes, km.assignment, m);
  p.iterations = km.iterations;
  return p;
}

}  // namespace strainrom
