// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace strainrom {

/// Returns f(x) and writes the gradient. May return +inf (or NaN) for
/// inadmissible x; the line search then backtracks.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 500;
  double grad_tol = 1e-8;  ///< stop when ||g|| < grad_tol * (1 + |f|)
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 40;
  bool verbose = false;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;  ///< best iterate returned, a warning was printed
  std::vector<double> history;      ///< f at x0 and after every accepted step
};

/// Limited-memory BFGS (two-loop recursion) with a strong-Wolfe line search.
/// Throws LineSearchFailure only if f(x0) is not finite.
LbfgsResult lbfgs_minimize(const Objective& objective, const Eigen::VectorXd& x0, const LbfgsOptions& options = {});

}  // namespace strainrom
