// SPDX-License-Identifier: Apache-2.0
#include "strainrom/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <optional>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "strainrom/error.hpp"
#include "strainrom/fom.hpp"

namespace strainrom {

namespace {

VoigtVec9 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VoigtVec9 v;
  do {
    for (int k = 0; k < 9; ++k) v(k) = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

struct PathResult {
  std::vector<FomState> states;
  std::vector<VoigtVec9> pbar;
  std::vector<double> seconds;
  std::optional<std::string> failure;
};

PathResult run_path(FomSolver& solver, const LoadPath& path, bool keep_failure_error) {
  PathResult out;
  FomState state = solver.reference_state();
  for (int k = 0; k < path.n_steps(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      state = solver.solve_increment(path.fbar[k], state);
    } catch (const Error& err) {
      if (keep_failure_error) throw Error(err.kind(), fmt::format("step {}: {}", k, err.what()));
      out.failure = fmt::format("step {}: {}", k, err.what());
      return out;
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    out.pbar.push_back(homogenize_stress(state, solver.gauss(), solver.cell_volume()));
    out.states.push_back(state);
  }
  return out;
}

}  // namespace

std::vector<LoadPath> generate_load_paths(std::uint64_t seed, int n_paths, int n_steps, double dF_lp, double dF_ls) {
  if (n_steps < 1) raise(ErrorKind::ConfigError, "load paths need at least one step");
  if (dF_lp < 0.0 || dF_ls < 0.0) raise(ErrorKind::ConfigError, "step lengths must be non-negative");
  std::mt19937_64 rng(seed);
  std::vector<LoadPath> paths(static_cast<std::size_t>(n_paths));
  for (auto& path : paths) {
    path.dF_lp = dF_lp;
    path.dF_ls = dF_ls;
    path.direction_lp = random_direction(rng);
    VoigtVec9 F = voigt_identity();
    for (int k = 0; k < n_steps; ++k) {
      const VoigtVec9 n_ls = random_direction(rng);
      path.directions_ls.push_back(n_ls);
      F += dF_lp * path.direction_lp + dF_ls * n_ls;
      path.fbar.push_back(F);
    }
  }
  return paths;
}

Eigen::MatrixXd SnapshotSet::fluctuations() const {
  Eigen::MatrixXd out = F;
  for (Eigen::Index g = 0; g < n_gauss(); ++g) out.middleRows(9 * g, 9) -= Fbar;
  return out;
}

SnapshotSet SnapshotSet::first_paths(int n_paths) const {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < cols(); ++j)
    if (path_index[j] < n_paths) keep.push_back(j);
  SnapshotSet out = *this;
  const auto n = static_cast<Eigen::Index>(keep.size());
  out.F.resize(F.rows(), n);
  out.Fbar.resize(9, n);
  out.Pbar.resize(9, n);
  out.fom_seconds.resize(n);
  if (has_stresses()) out.P.resize(P.rows(), n);
  out.path_index.clear();
  out.step_index.clear();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = keep[k];
    out.F.col(k) = F.col(j);
    out.Fbar.col(k) = Fbar.col(j);
    out.Pbar.col(k) = Pbar.col(j);
    out.fom_seconds(k) = fom_seconds(j);
    if (has_stresses()) out.P.col(k) = P.col(j);
    out.path_index.push_back(path_index[j]);
    out.step_index.push_back(step_index[j]);
  }
  return out;
}

std::vector<int> SnapshotSet::paths() const {
  std::vector<int> out;
  for (int p : path_index)
    if (out.empty() || out.back() != p) out.push_back(p);
  return out;
}

SnapshotSet collect_snapshots(const std::vector<LoadPath>& paths, const Mesh& mesh, const Material& material,
                              const CollectOptions& options) {
  const int n_paths = static_cast<int>(paths.size());
  std::vector<PathResult> results(paths.size());
  const int threads = std::clamp(options.threads, 1, std::max(1, n_paths));

  FomSolver prototype(mesh, material);
  if (threads == 1) {
    for (int p = 0; p < n_paths; ++p) results[p] = run_path(prototype, paths[p], options.strict);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          FomSolver solver(mesh, material);
          for (int p = t; p < n_paths; p += threads) results[p] = run_path(solver, paths[p], options.strict);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SnapshotSet set;
  const auto& gauss = prototype.gauss();
  set.volumes = gauss.volumes();
  set.cell_volume = prototype.cell_volume();
  set.mesh_hash = mesh_hash(mesh);
  set.material = material;

  Eigen::Index s = 0;
  for (const auto& r : results) s += static_cast<Eigen::Index>(r.states.size() * !r.failure.has_value());
  const Eigen::Index rows = 9 * static_cast<Eigen::Index>(gauss.size());
  set.F.resize(rows, s);
  set.Fbar.resize(9, s);
  set.Pbar.resize(9, s);
  set.fom_seconds.resize(s);
  if (options.with_stresses) set.P.resize(rows, s);

  Eigen::Index col = 0;
  for (int p = 0; p < n_paths; ++p) {
    const auto& r = results[p];
    if (r.failure) {
      const std::string msg = fmt::format("path {} {}", p, *r.failure);
      std::cerr << "warning: dropping load path: " << msg << '\n';
      set.failures.push_back(msg);
      continue;
    }
    for (std::size_t k = 0; k < r.states.size(); ++k, ++col) {
      set.F.col(col) = gauss_strains(r.states[k]);
      set.Fbar.col(col) = r.states[k].Fbar;
      set.Pbar.col(col) = r.pbar[k];
      set.fom_seconds(col) = r.seconds[k];
      if (options.with_stresses) set.P.col(col) = gauss_stresses(r.states[k]);
      set.path_index.push_back(p);
      set.step_index.push_back(static_cast<int>(k));
    }
  }
  return set;
}

}  // namespace strainrom
