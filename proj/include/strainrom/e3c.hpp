// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "strainrom/cubature.hpp"
#include "strainrom/kmeans.hpp"
#include "strainrom/lbfgs.hpp"
#include "strainrom/material.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/sampling.hpp"

namespace strainrom {

/// Fixed data of the correction problem. The design vector stacks the m
/// centroid bases psi^c, each 9 x d column-major.
struct E3cData {
  Material material;
  Eigen::MatrixXd Y;             ///< d x s reduced snapshot coordinates
  Eigen::MatrixXd Fbar;          ///< 9 x s
  Eigen::MatrixXd Pbar;          ///< 9 x s
  Eigen::MatrixXd strain_target; ///< 9 x s, sum_g Ftilde^gj V^g
  Eigen::VectorXd xi;            ///< cluster volumes, held fixed
  double cell_volume = 0.0;
  double p_strain = 0.0;
  double work_scale = 0.0;       ///< 1/V^2
  double stress_scale = 0.0;     ///< 1/V^2
  double strain_scale = 0.0;     ///< 1/V^2, so p_strain weighs strain against stress

  [[nodiscard]] int d() const noexcept { return static_cast<int>(Y.rows()); }
  [[nodiscard]] int m() const noexcept { return static_cast<int>(xi.size()); }
  [[nodiscard]] int s() const noexcept { return static_cast<int>(Y.cols()); }
};

/// Default strain penalty E^2.
double default_strain_penalty(const Material& mat);

E3cData make_e3c_data(const ModeBasis& basis, const SnapshotSet& set, const Eigen::VectorXd& xi, double p_strain);

struct E3cTerms {
  double work = 0.0;    ///< scaled sum_j ||sum_c psi^cT P^cj xi^c||^2
  double stress = 0.0;  ///< scaled sum_j ||sum_c P^cj xi^c - V Pbar^j||^2
  double strain = 0.0;  ///< scaled p_strain sum_j ||sum_c psi^c y^j xi^c - target_j||^2
  [[nodiscard]] double total() const noexcept { return work + stress + strain; }
};

Eigen::VectorXd pack_design(const std::vector<ModeSlice>& psi);
std::vector<ModeSlice> unpack_design(const Eigen::VectorXd& x, int m, int d);

/// Objective value; the analytic gradient is written to grad when non-null.
/// Throws NonPositiveJacobian naming the offending (c, j).
double e3c_objective(const E3cData& data, const Eigen::VectorXd& x, Eigen::VectorXd* grad, E3cTerms* terms = nullptr);

struct E3cOptions {
  int m = 20;
  std::uint64_t seed = 1;
  double p_strain = -1.0;  ///< negative selects default_strain_penalty
  LbfgsOptions lbfgs;
};

struct E3cTraining {
  CubatureModel model;
  ClusterPartition partition;
  E3cTerms initial;
  E3cTerms corrected;
  LbfgsResult optimizer;
};

/// Cluster, then correct the centroid bases by L-BFGS with xi fixed.
/// Inadmissible trial points are reported to the line search as +inf.
E3cTraining build_e3c_model(const ModeBasis& basis, const SnapshotSet& set, const E3cOptions& options);

}  // namespace strainrom
