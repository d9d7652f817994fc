// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "strainrom/cubature.hpp"
#include "strainrom/nnls.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/sampling.hpp"

namespace strainrom {

/// Stacked cubature fitting problem, one column per Gauss point. Row blocks:
///   [0, d*s)              psi^gT P^gj          target sum_g psi^gT P^gj V^g
///   d*s                   sqrt(p_vol)          target sqrt(p_vol) sum_g V^g
///   [d*s+1, d*s+1+9*s)    P^gj                 target V Pbar^j
struct NnlsSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double p_vol = 0.0;
  int d = 0;
  int s = 0;

  [[nodiscard]] Eigen::Index volume_row() const noexcept { return static_cast<Eigen::Index>(d) * s; }
  [[nodiscard]] Eigen::Index stress_row() const noexcept { return volume_row() + 1; }
};

/// Volume penalty used when none is given: (||b_stress|| / V)^2, so the volume
/// row weighs as much as the whole homogenisation block.
double default_volume_penalty(const SnapshotSet& set);

/// Throws MissingStressSnapshots when the set carries no Gauss-point stresses.
/// A negative p_vol selects default_volume_penalty.
NnlsSystem assemble_nnls_system(const SnapshotSet& set, const ModeBasis& basis, double p_vol = -1.0);

/// Selected Gauss points with their weights. Throws EmptySelection if no
/// weight is positive.
CubatureModel build_ecm_model(const Eigen::VectorXd& weights, const ModeBasis& basis, double cell_volume);

struct EcmOptions {
  int m = 20;
  double p_vol = -1.0;
  double tol = 1e-10;
  bool separate_homog_weights = false;
};

struct EcmTraining {
  CubatureModel model;
  NnlsResult nnls;
  double p_vol = 0.0;
};

/// Assemble, solve and build. With separate_homog_weights a second NNLS over
/// the volume and stress rows, restricted to the selected points, yields the
/// homogenisation weights.
EcmTraining train_ecm(const SnapshotSet& set, const ModeBasis& basis, const EcmOptions& options);

}  // namespace strainrom
