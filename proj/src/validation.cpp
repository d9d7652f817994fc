// SPDX-License-Identifier: Apache-2.0
#include "strainrom/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

#include <fmt/format.h>

#include "strainrom/e3c.hpp"
#include "strainrom/ecm.hpp"
#include "strainrom/error.hpp"
#include "strainrom/pod.hpp"

namespace strainrom {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int model_dim(const OnlineModel& model) {
  return std::visit([](const auto& m) { return m.d; }, model);
}

int model_points(const OnlineModel& model) {
  return std::visit([](const auto& m) { return m.m(); }, model);
}

}  // namespace

double mean_relative_error(const Eigen::MatrixXd& rom, const Eigen::MatrixXd& val) {
  if (rom.rows() != val.rows() || rom.cols() != val.cols())
    raise(ErrorKind::DimensionMismatch, "reduced and reference stresses differ in shape");
  if (val.cols() == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < val.cols(); ++i) {
    const double n = val.col(i).norm();
    if (!(n > 0.0)) raise(ErrorKind::ZeroReferenceNorm, fmt::format("reference sample {} has zero norm", i));
    sum += (rom.col(i) - val.col(i)).norm() / n;
  }
  return 100.0 * sum / static_cast<double>(val.cols());
}

OnlineRun run_online(const OnlineModel& model, const Material& mat, const SnapshotSet& val,
                     const OnlineOptions& options) {
  const Eigen::Index s = val.cols();
  OnlineRun run;
  run.Pbar = Eigen::MatrixXd::Constant(9, s, std::numeric_limits<double>::quiet_NaN());
  run.Abar.assign(static_cast<std::size_t>(s), VoigtMat9::Zero());
  run.ok.assign(static_cast<std::size_t>(s), 0);
  const int d = model_dim(model);
  const auto calls0 = material_evaluation_count();

  const auto t0 = Clock::now();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  int current_path = -1;
  bool path_failed = false;
  for (Eigen::Index j = 0; j < s; ++j) {
    if (val.path_index[j] != current_path) {
      current_path = val.path_index[j];
      path_failed = false;
      y.setZero();
    }
    if (path_failed) continue;
    const VoigtVec9 Fbar = val.Fbar.col(j);
    try {
      if (const auto* cub = std::get_if<CubatureModel>(&model)) {
        RomSolution sol = newton_solve(*cub, mat, Fbar, y, options.newton, options.with_tangent);
        y = sol.y;
        run.Pbar.col(j) = sol.Pbar;
        run.Abar[j] = sol.Abar;
      } else {
        const auto& em = std::get<EmslModel>(model);
        EmslStepResult r = options.emsl_passes > 1 ? emsl_fixed_point(em, mat, Fbar, y, options.emsl_passes, options.emsl_tol)
                                                   : emsl_step(em, mat, Fbar, y);
        y = r.y;
        run.Pbar.col(j) = r.Pbar;
        run.Abar[j] = r.Abar;
      }
      run.ok[j] = 1;
    } catch (const Error& err) {
      const bool expected = err.kind() == ErrorKind::RomDivergence || err.kind() == ErrorKind::ReferenceInverted ||
                            err.kind() == ErrorKind::SingularReducedSystem || err.kind() == ErrorKind::SingularTangent ||
                            err.kind() == ErrorKind::NonPositiveJacobian;
      if (!expected) throw;
      path_failed = true;
      ++run.divergences;
      if (run.first_failure.empty())
        run.first_failure = fmt::format("path {} step {}: {} ({})", current_path, val.step_index[j],
                                        to_string(err.kind()), err.what());
    }
  }
  run.seconds = seconds_since(t0);
  run.material_calls = material_evaluation_count() - calls0;
  return run;
}

ValidationRow run_validation(const OnlineModel& model, const Material& mat, const SnapshotSet& val,
                             const ValidationOptions& options) {
  ValidationRow row;
  row.d = model_dim(model);
  row.points = model_points(model);
  row.m = row.points;
  if (const auto* cub = std::get_if<CubatureModel>(&model)) row.method = cub->kind;
  else row.method = "EMSL";

  std::vector<double> times;
  OnlineRun run;
  for (int rep = 0; rep < std::max(1, options.repeats); ++rep) {
    run = run_online(model, mat, val, options.online);
    times.push_back(run.seconds);
  }
  std::sort(times.begin(), times.end());
  row.online_seconds = times[times.size() / 2];
  double fom = 0.0;
  for (Eigen::Index j = 0; j < val.cols(); ++j) fom += val.fom_seconds(j);
  row.relative_runtime = fom > 0.0 ? 100.0 * row.online_seconds / fom : 0.0;

  row.divergences = run.divergences;
  row.failure = run.first_failure;
  std::vector<Eigen::Index> used;
  for (Eigen::Index j = 0; j < val.cols(); ++j)
    if (val.Pbar.col(j).norm() > 0.0) used.push_back(j);
  if (run.divergences > 0) {
    row.failed = true;
    return row;
  }
  Eigen::MatrixXd rom(9, static_cast<Eigen::Index>(used.size())), ref(9, static_cast<Eigen::Index>(used.size()));
  for (std::size_t k = 0; k < used.size(); ++k) {
    rom.col(static_cast<Eigen::Index>(k)) = run.Pbar.col(used[k]);
    ref.col(static_cast<Eigen::Index>(k)) = val.Pbar.col(used[k]);
    row.sample_errors.push_back(100.0 * (run.Pbar.col(used[k]) - val.Pbar.col(used[k])).norm() /
                                val.Pbar.col(used[k]).norm());
  }
  const double err = mean_relative_error(rom, ref);
  if (!(err <= 100.0)) {
    row.failed = true;
    row.failure = fmt::format("mean error {:.3g} % exceeds 100 %", err);
    return row;
  }
  row.mean_error = err;
  return row;
}

OnlineOptions online_options(const Config& config) {
  OnlineOptions o;
  o.emsl_passes = config.emsl_passes;
  o.emsl_tol = config.emsl_tol;
  return o;
}

ValidationReport sweep(const Config& config, const SnapshotSet& train, const SnapshotSet& val, bool verbose) {
  ValidationReport report;
  report.seed = config.seed;
  report.mesh_hash = train.mesh_hash;
  report.config_hash = config_hash(config);
  for (Eigen::Index j = 0; j < val.cols(); ++j) {
    report.fom_seconds += val.fom_seconds(j);
    if (val.Pbar.col(j).norm() > 0.0) ++report.samples;
  }

  ValidationOptions vopt;
  vopt.online = online_options(config);
  vopt.repeats = config.timing_repeats;
  const Eigen::MatrixXd Ft = train.fluctuations();
  const int rank = numerical_rank(Ft);
  const auto G = static_cast<int>(train.n_gauss());

  for (int d : config.d_list) {
    if (d > rank) {
      report.skipped.push_back(fmt::format("d={} exceeds snapshot rank {}", d, rank));
      continue;
    }
    const ModeBasis basis = compute_basis(Ft, d);
    for (const auto& method : config.methods) {
      for (int m : config.m_list) {
        if (m > G) {
          report.skipped.push_back(fmt::format("{} d={} m={}: only {} Gauss points", method, d, m, G));
          continue;
        }
        const auto t0 = Clock::now();
        ValidationRow row;
        try {
          OnlineModel model;
          if (method == "ECM") {
            EcmOptions o;
            o.m = m;
            o.p_vol = config.p_vol;
            o.tol = config.nnls_tol;
            o.separate_homog_weights = config.separate_homog_weights;
            model = train_ecm(train, basis, o).model;
          } else if (method == "E3C") {
            E3cOptions o;
            o.m = m;
            o.seed = config.seed;
            o.p_strain = config.p_strain;
            o.lbfgs.max_iter = config.lbfgs_max_iter;
            o.lbfgs.grad_tol = config.lbfgs_grad_tol;
            model = build_e3c_model(basis, train, o).model;
          } else {
            EmslOptions o;
            o.m = m;
            o.seed = config.seed;
            model = train_emsl(basis, train, o).model;
          }
          const double train_s = seconds_since(t0);
          row = run_validation(model, config.material, val, vopt);
          row.train_seconds = train_s;
        } catch (const Error& err) {
          row.method = method;
          row.d = d;
          row.failed = true;
          row.failure = fmt::format("training failed: {} ({})", to_string(err.kind()), err.what());
        }
        row.method = method;
        row.m = m;
        if (verbose) {
          std::cerr << fmt::format("  {:4s} d={:2d} m={:3d}  ", method, d, m)
                    << (row.failed ? fmt::format("failed: {}", row.failure)
                                   : fmt::format("error {:.4g} %  online {:.4g} s  train {:.3g} s", row.mean_error,
                                                 row.online_seconds, row.train_seconds))
                    << '\n';
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

}  // namespace strainrom
