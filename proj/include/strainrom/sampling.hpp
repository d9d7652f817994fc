// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strainrom/material.hpp"
#include "strainrom/mesh.hpp"
#include "strainrom/voigt.hpp"

namespace strainrom {

/// Randomised macroscopic load path starting at Fbar = I. Increment k is
///   dFbar_k = dF_lp * N_lp + dF_ls * N_ls[k],
/// with N_lp fixed along the path and N_ls[k] redrawn per step.
struct LoadPath {
  VoigtVec9 direction_lp = VoigtVec9::Zero();
  std::vector<VoigtVec9> directions_ls;
  double dF_lp = 0.0;
  double dF_ls = 0.0;
  std::vector<VoigtVec9> fbar;  ///< Fbar after each step (the start I is implicit)

  [[nodiscard]] int n_steps() const noexcept { return static_cast<int>(fbar.size()); }
};

/// Directions are uniform on the unit Frobenius sphere of 9-vectors
/// (normalised Gaussian draws). Deterministic for a given seed.
std::vector<LoadPath> generate_load_paths(std::uint64_t seed, int n_paths, int n_steps, double dF_lp, double dF_ls);

/// Column-aligned snapshot data. Column j belongs to (path_index[j], step_index[j]).
struct SnapshotSet {
  Eigen::MatrixXd F;          ///< 9|G| x s Gauss-point deformation gradients
  Eigen::MatrixXd Fbar;       ///< 9 x s
  Eigen::MatrixXd P;          ///< 9|G| x s, empty unless stresses were requested
  Eigen::MatrixXd Pbar;       ///< 9 x s
  Eigen::VectorXd volumes;    ///< V^g
  Eigen::VectorXd fom_seconds;  ///< wall time of the FOM increment per column
  std::vector<int> path_index;
  std::vector<int> step_index;
  double cell_volume = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t mesh_hash = 0;
  Material material;
  std::vector<std::string> failures;  ///< dropped paths, "path <p> step <k>: <reason>"

  [[nodiscard]] Eigen::Index cols() const noexcept { return Fbar.cols(); }
  [[nodiscard]] Eigen::Index n_gauss() const noexcept { return volumes.size(); }
  [[nodiscard]] bool has_stresses() const noexcept { return P.size() > 0; }

  /// F with the macroscopic part removed from every Gauss block.
  [[nodiscard]] Eigen::MatrixXd fluctuations() const;

  /// Columns whose path index is below n_paths.
  [[nodiscard]] SnapshotSet first_paths(int n_paths) const;

  /// Path indices in column order, each listed once.
  [[nodiscard]] std::vector<int> paths() const;
};

struct CollectOptions {
  bool with_stresses = false;
  int threads = 1;
  bool strict = false;  ///< rethrow NewtonDivergence instead of dropping the path
};

/// Runs the FOM along each path (warm-started) and stores one column per
/// converged step. Failed paths are dropped with a warning on stderr unless
/// strict is set. Column order is (path, step) regardless of thread count.
SnapshotSet collect_snapshots(const std::vector<LoadPath>& paths, const Mesh& mesh, const Material& material,
                              const CollectOptions& options = {});

}  // namespace strainrom
