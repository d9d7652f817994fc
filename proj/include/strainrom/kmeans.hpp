// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "strainrom/pod.hpp"

namespace strainrom {

struct KMeansResult {
  std::vector<int> assignment;      ///< point -> cluster
  Eigen::MatrixXd centroids;        ///< features x m, volume-weighted means
  int iterations = 0;               ///< Lloyd iterations performed
  std::vector<double> objective;    ///< weighted within-cluster SSE after each iteration
};

/// Volume-weighted Lloyd iterations with k-means++ seeding. Points are the
/// columns of `points`. Stops when assignments are stable or after max_iter
/// iterations. Empty clusters are reseeded from the point farthest from its
/// centroid. Deterministic for a given seed.
KMeansResult weighted_kmeans(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights, int m,
                             std::uint64_t seed, int max_iter = 300);

/// Gauss points grouped into clusters of the flattened mode slices psi^g.
struct ClusterPartition {
  std::vector<int> assignment;
  Eigen::VectorXd xi;              ///< cluster volumes
  std::vector<ModeSlice> psi;      ///< centroid bases, psi_bar / xi
  std::vector<ModeSlice> psi_bar;  ///< sum_{g in c} psi^g V^g
  int iterations = 0;

  [[nodiscard]] int m() const noexcept { return static_cast<int>(xi.size()); }
};

/// psi^g flattened row-major (index alpha*d + i) into columns of a 9d x |G| matrix.
Eigen::MatrixXd flatten_slices(const ModeBasis& basis);

/// Partition data for a fixed assignment.
ClusterPartition partition_from_assignment(const ModeBasis& basis, const Eigen::VectorXd& volumes,
                                           const std::vector<int>& assignment, int m);

/// k-means on the mode slices. Throws ConfigError unless 1 <= m <= |G|.
ClusterPartition cluster_gauss_points(const ModeBasis& basis, const Eigen::VectorXd& volumes, int m,
                                      std::uint64_t seed);

}  // namespace strainrom
