// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "strainrom/config.hpp"
#include "strainrom/cubature.hpp"
#include "strainrom/emsl.hpp"
#include "strainrom/sampling.hpp"

namespace strainrom {

/// (1/N) sum_i ||rom_i - val_i|| / ||val_i|| * 100 over columns. Throws
/// ZeroReferenceNorm if a reference column vanishes and DimensionMismatch on
/// a shape mismatch.
double mean_relative_error(const Eigen::MatrixXd& rom, const Eigen::MatrixXd& val);

using OnlineModel = std::variant<CubatureModel, EmslModel>;

struct OnlineOptions {
  RomOptions newton;
  int emsl_passes = 1;
  double emsl_tol = 1e-10;
  bool with_tangent = true;
};

struct OnlineRun {
  Eigen::MatrixXd Pbar;                 ///< 9 x s, NaN columns where a path failed
  std::vector<VoigtMat9> Abar;
  std::vector<char> ok;                 ///< per column
  int divergences = 0;                  ///< failed load paths
  std::string first_failure;
  std::uint64_t material_calls = 0;
  double seconds = 0.0;                 ///< online loop wall time
};

/// Runs the online phase along every path of the set, warm-starting each
/// step from the previous one and starting each path at y = 0. A failure
/// aborts the rest of that path only.
OnlineRun run_online(const OnlineModel& model, const Material& mat, const SnapshotSet& val,
                     const OnlineOptions& options = {});

struct ValidationRow {
  std::string method;
  int d = 0;
  int m = 0;                    ///< requested points
  int points = 0;               ///< points in the trained model
  double mean_error = std::numeric_limits<double>::quiet_NaN();  ///< percent
  bool failed = false;
  int divergences = 0;
  std::string failure;
  double online_seconds = 0.0;  ///< median over repetitions
  double relative_runtime = 0.0;  ///< percent of the FOM time on the same samples
  double train_seconds = 0.0;
  std::vector<double> sample_errors;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  std::uint64_t seed = 0;
  std::uint64_t mesh_hash = 0;
  std::uint64_t config_hash = 0;
  int samples = 0;
  double fom_seconds = 0.0;
  std::vector<std::string> skipped;  ///< cells left out of the sweep and why
};

struct ValidationOptions {
  OnlineOptions online;
  int repeats = 3;
};

/// Validates one model against the FOM results in val. Zero-norm reference
/// samples are left out. The row is failed if any path diverged or the mean
/// error exceeds 100 %; a failed row carries no mean error.
ValidationRow run_validation(const OnlineModel& model, const Material& mat, const SnapshotSet& val,
                             const ValidationOptions& options = {});

OnlineOptions online_options(const Config& config);

/// Trains and validates every (method, d, m) cell of the config grid on the
/// given training and validation sets. Cells with m > |G| or d above the
/// snapshot rank are skipped and listed.
ValidationReport sweep(const Config& config, const SnapshotSet& train, const SnapshotSet& val, bool verbose = false);

}  // namespace strainrom
