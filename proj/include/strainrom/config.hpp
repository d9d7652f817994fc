// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "strainrom/material.hpp"
#include "strainrom/mesh.hpp"

namespace strainrom {

/// Run configuration. Text form is one "key = value" per line, '#' comments:
///   material.kind = neo-hooke | linear-elastic
///   material.E, material.nu
///   rve.n_voxels, rve.edge_length
///   rve.pores = x y z r; x y z r; ...      (empty string for no pores)
///   sampling.seed, sampling.train_paths, sampling.validation_paths,
///   sampling.steps, sampling.dflp, sampling.dfls
///   sweep.d = 9,12,20      sweep.m = 1,5,20,50      sweep.methods = ECM,E3C,EMSL
///   ecm.pvol, ecm.tol, ecm.separate_homog_weights
///   e3c.pstrain, e3c.max_iter, e3c.grad_tol
///   emsl.passes, emsl.tol
///   run.threads, run.timing_repeats
struct Config {
  Material material;
  int n_voxels = 8;
  double edge_length = 2.0;
  std::vector<Pore> pores = default_pores();

  std::uint64_t seed = 1;
  int train_paths = 20;
  int validation_paths = 40;  ///< the training paths plus 20 further ones
  int steps = 8;
  double dF_lp = 0.025;
  double dF_ls = 0.015;

  std::vector<int> d_list{9, 12, 20};
  std::vector<int> m_list{1, 5, 20, 50};
  std::vector<std::string> methods{"ECM", "E3C", "EMSL"};

  double p_vol = -1.0;
  double nnls_tol = 1e-10;
  bool separate_homog_weights = false;
  double p_strain = -1.0;
  int lbfgs_max_iter = 500;
  double lbfgs_grad_tol = 1e-8;
  int emsl_passes = 1;
  double emsl_tol = 1e-10;

  int threads = 1;
  int timing_repeats = 3;
};

/// Applies one "key=value" assignment. Throws ConfigError for unknown keys or
/// malformed values.
void apply_setting(Config& config, const std::string& key, const std::string& value);
Config parse_config(const std::string& text, Config base = {});
Config load_config(const std::filesystem::path& file, Config base = {});

/// Canonical key=value dump; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const Config& config);
std::uint64_t config_hash(const Config& config);

Mesh build_mesh(const Config& config);

}  // namespace strainrom
