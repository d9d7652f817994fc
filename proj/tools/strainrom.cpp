// SPDX-License-Identifier: Apache-2.0
// Command-line front end: snapshot generation, model training, validation
// sweeps and reports.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "strainrom/config.hpp"
#include "strainrom/e3c.hpp"
#include "strainrom/ecm.hpp"
#include "strainrom/emsl.hpp"
#include "strainrom/error.hpp"
#include "strainrom/fom.hpp"
#include "strainrom/model_io.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/report.hpp"
#include "strainrom/sampling.hpp"
#include "strainrom/store.hpp"
#include "strainrom/stress_field.hpp"
#include "strainrom/validation.hpp"

namespace fs = std::filesystem;
using namespace strainrom;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::vector<std::string> set;
};

Config load(const Globals& g) {
  Config c = g.config_file.empty() ? Config{} : load_config(g.config_file);
  for (const auto& kv : g.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) raise(ErrorKind::ConfigError, fmt::format("--set expects key=value, got '{}'", kv));
    apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  c.material.validate();
  return c;
}

fs::path out_dir(const Globals& g, const char* fallback) {
  fs::path p = g.out.empty() ? fs::path(fallback) : fs::path(g.out);
  fs::create_directories(p);
  return p;
}

VoigtVec9 parse_voigt(const std::string& text) {
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  VoigtVec9 v;
  for (int k = 0; k < 9; ++k)
    if (!(in >> v(k))) raise(ErrorKind::ConfigError, fmt::format("expected 9 values, got '{}'", text));
  std::string rest;
  if (in >> rest) raise(ErrorKind::ConfigError, fmt::format("expected 9 values, got '{}'", text));
  return v;
}

// One deformation gradient per line, 9 values in Voigt order, '#' comments.
std::vector<VoigtVec9> read_path_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) raise(ErrorKind::ConfigError, fmt::format("cannot read path file {}", file.string()));
  std::vector<VoigtVec9> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',' || ch == ';') ch = ' ';
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_voigt(line));
  }
  if (out.empty()) raise(ErrorKind::ConfigError, fmt::format("{} holds no load steps", file.string()));
  return out;
}

std::vector<VoigtVec9> linear_path(const VoigtVec9& target, int steps) {
  std::vector<VoigtVec9> out;
  for (int k = 1; k <= steps; ++k) out.push_back(voigt_identity() + (target - voigt_identity()) * k / steps);
  return out;
}

std::string csv_values(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += fmt::format(";{:.10g}", m(i, j));
  return s;
}

std::string voigt_header(const char* prefix) {
  static const char* names[9] = {"11", "12", "13", "21", "22", "23", "31", "32", "33"};
  std::string s;
  for (const char* n : names) s += fmt::format(";{}{}", prefix, n);
  return s;
}

std::string tangent_header() {
  std::string s;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) s += fmt::format(";A_{}_{}", a, b);
  return s;
}

SnapshotSet training_set(const fs::path& store, int train_paths) {
  SnapshotSet set = read_store(store);
  return set.first_paths(train_paths);
}

Manifest provenance(const SnapshotSet& set, const Config& c) {
  Manifest m;
  m["mesh_hash"] = fmt::format("{}", set.mesh_hash);
  m["material.kind"] = std::string(to_string(set.material.kind));
  m["material.E"] = fmt::format("{:.17g}", set.material.E);
  m["material.nu"] = fmt::format("{:.17g}", set.material.nu);
  m["seed"] = fmt::format("{}", c.seed);
  return m;
}

Material material_of(const Manifest& m, const Material& fallback) {
  Material mat = fallback;
  if (m.count("material.kind")) mat.kind = parse_material_kind(m.at("material.kind"));
  if (m.count("material.E")) mat.E = std::stod(m.at("material.E"));
  if (m.count("material.nu")) mat.nu = std::stod(m.at("material.nu"));
  return mat;
}

OnlineModel read_online_model(const fs::path& dir, Manifest& manifest) {
  const std::string type = model_type(dir);
  if (type == "EMSL") return read_emsl(dir, &manifest);
  if (type == "ECM" || type == "E3C" || type == "POD-FULL") return read_cubature(dir, &manifest);
  raise(ErrorKind::ConfigError, fmt::format("{} holds a {} model, which has no online phase", dir.string(), type));
}

// A stored basis fixes d unless --d was given explicitly.
ModeBasis basis_for(const std::string& basis_file, const SnapshotSet& set, int d, bool d_given) {
  if (!basis_file.empty()) {
    ModeBasis b = read_basis(basis_file);
    if (d_given && b.d() != d) raise(ErrorKind::ConfigError, fmt::format("basis has d = {}, --d asks for {}", b.d(), d));
    return b;
  }
  return compute_basis(set, d);
}

// Snapshot store covering every validation path, generated on demand.
SnapshotSet validation_store(const Config& c, const std::string& dir, bool verbose) {
  if (!dir.empty() && fs::exists(fs::path(dir) / "manifest.txt")) return read_store(dir);
  const int n_paths = std::max(c.validation_paths, c.train_paths);
  if (verbose) std::cerr << fmt::format("running the FOM on {} load paths\n", n_paths);
  const Mesh mesh = build_mesh(c);
  const auto paths = generate_load_paths(c.seed, n_paths, c.steps, c.dF_lp, c.dF_ls);
  CollectOptions opt;
  opt.with_stresses = true;
  opt.threads = c.threads;
  SnapshotSet set = collect_snapshots(paths, mesh, c.material, opt);
  set.seed = c.seed;
  if (!dir.empty()) write_store(set, dir);
  return set;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strain-space reduced-order models for periodic hyperelastic RVEs"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_file, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", g.set, "override one configuration key (key=value), repeatable");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output directory or model path");
  app.add_option("--threads", g.threads, "worker threads for snapshot generation")->check(CLI::PositiveNumber);

  std::function<void()> action;

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "build the RVE and export it as text");
  mesh_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      const Mesh mesh = build_mesh(c);
      const PeriodicMap pm = periodic_pairs(mesh);
      const GaussTable gt = gauss_table(mesh);
      const fs::path dir = out_dir(g, ".");
      std::ofstream out(dir / "mesh.txt");
      write_mesh_text(mesh, out);
      fmt::print("elements {}\nnodes {}\ngauss_points {}\nperiodic_classes {}\ndofs {}\nmatrix_volume {:.10g}\nmesh_hash {}\n",
                 mesh.elements.size(), mesh.nodes.size(), gt.size(), pm.n_classes, pm.independent_dofs(),
                 gt.total_volume(), mesh_hash(mesh));
    };
  });

  // fom-solve
  std::string fom_fbar, fom_path, fom_dump;
  int fom_steps = 8;
  auto* fom_cmd = app.add_subcommand("fom-solve", "solve the full-order RVE along a load path");
  fom_cmd->add_option("--fbar", fom_fbar, "target Fbar, 9 values row-major (ramped linearly from I)");
  fom_cmd->add_option("--path", fom_path, "file with one Fbar (9 values) per line")->check(CLI::ExistingFile);
  fom_cmd->add_option("--steps", fom_steps, "ramp steps for --fbar")->check(CLI::PositiveNumber);
  fom_cmd->add_option("--dump", fom_dump, "also write Gauss-point fields to this snapshot store");
  fom_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      std::vector<VoigtVec9> steps;
      if (!fom_path.empty()) steps = read_path_file(fom_path);
      else if (!fom_fbar.empty()) steps = linear_path(parse_voigt(fom_fbar), fom_steps);
      else raise(ErrorKind::ConfigError, "fom-solve needs --fbar or --path");
      const Mesh mesh = build_mesh(c);
      FomSolver solver(mesh, c.material);
      FomState state = solver.reference_state();
      const fs::path dir = out_dir(g, ".");
      std::ofstream csv(dir / "fom.csv");
      csv << "step;iterations;seconds" << voigt_header("F") << voigt_header("P") << tangent_header() << '\n';
      LoadPath lp;
      lp.fbar = steps;
      for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        state = solver.solve_increment(steps[k], state);
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const VoigtVec9 Pbar = homogenize_stress(state, solver.gauss(), solver.cell_volume());
        const VoigtMat9 Abar = solver.macro_tangent(state);
        csv << fmt::format("{};{};{:.6g}", k + 1, state.iterations, sec) << csv_values(steps[k].transpose())
            << csv_values(Pbar.transpose()) << csv_values(Abar) << '\n';
        std::cerr << fmt::format("step {:3d}  iterations {}  |Pbar| = {:.6g}\n", k + 1, state.iterations, Pbar.norm());
      }
      if (!fom_dump.empty()) {
        CollectOptions opt;
        opt.with_stresses = true;
        opt.strict = true;
        SnapshotSet set = collect_snapshots({lp}, mesh, c.material, opt);
        set.seed = c.seed;
        write_store(set, fom_dump);
      }
    };
  });

  // sample
  std::optional<int> n_paths, n_steps;
  std::optional<double> dflp, dfls;
  bool with_stresses = false;
  auto* sample_cmd = app.add_subcommand("sample", "generate load paths and collect FOM snapshots");
  sample_cmd->add_option("--paths", n_paths, "number of load paths")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--steps", n_steps, "steps per path")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--dflp", dflp, "fixed-direction step length");
  sample_cmd->add_option("--dfls", dfls, "random-direction step length");
  sample_cmd->add_flag("--with-stresses", with_stresses, "store Gauss-point stresses (needed for ECM)");
  sample_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      const Mesh mesh = build_mesh(c);
      const auto paths = generate_load_paths(c.seed, n_paths.value_or(c.train_paths), n_steps.value_or(c.steps),
                                             dflp.value_or(c.dF_lp), dfls.value_or(c.dF_ls));
      CollectOptions opt;
      opt.with_stresses = with_stresses;
      opt.threads = c.threads;
      SnapshotSet set = collect_snapshots(paths, mesh, c.material, opt);
      set.seed = c.seed;
      const fs::path dir = out_dir(g, "snapshots");
      write_store(set, dir);
      fmt::print("columns {}\ngauss_points {}\nfailed_paths {}\nstore {}\n", set.cols(), set.n_gauss(),
                 set.failures.size(), dir.string());
    };
  });

  // shared training options
  int d = 12, m = 20;
  std::string snapshots, basis_file;
  std::optional<int> train_paths;
  std::vector<CLI::Option*> d_options;
  auto d_given = [&] {
    return std::any_of(d_options.begin(), d_options.end(), [](const CLI::Option* o) { return o->count() > 0; });
  };
  auto add_training = [&](CLI::App* cmd, bool with_m) {
    d_options.push_back(cmd->add_option("--d", d, "number of POD modes")->check(CLI::PositiveNumber));
    if (with_m) cmd->add_option("--m", m, "number of reduced integration points")->check(CLI::PositiveNumber);
    cmd->add_option("--snapshots", snapshots, "snapshot store directory")->required();
    cmd->add_option("--train-paths", train_paths, "use only the first N paths of the store");
    if (with_m) cmd->add_option("--basis", basis_file, "reuse a POD basis written by train-pod");
  };
  auto model_out = [&](const char* fallback) { return g.out.empty() ? fs::path(fallback) : fs::path(g.out); };

  auto* pod_cmd = app.add_subcommand("train-pod", "compute the strain POD basis");
  add_training(pod_cmd, false);
  pod_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      const SnapshotSet set = training_set(snapshots, train_paths.value_or(c.train_paths));
      const ModeBasis basis = compute_basis(set, d);
      write_basis(model_out("pod"), basis, provenance(set, c));
      fmt::print("modes {}\nsigma_1 {:.6g}\nsigma_d {:.6g}\nrank {}\n", basis.d(), basis.sigma(0),
                 basis.sigma(basis.d() - 1), numerical_rank(set.fluctuations()));
    };
  });

  std::optional<double> pvol;
  bool separate_homog = false;
  auto* ecm_cmd = app.add_subcommand("train-ecm", "train an ECM model by NNLS point selection");
  add_training(ecm_cmd, true);
  ecm_cmd->add_option("--pvol", pvol, "volume penalty (default: (||V Pbar||/V)^2)");
  ecm_cmd->add_flag("--separate-homog-weights", separate_homog, "fit separate homogenisation weights");
  ecm_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      const SnapshotSet set = training_set(snapshots, train_paths.value_or(c.train_paths));
      const ModeBasis basis = basis_for(basis_file, set, d, d_given());
      EcmOptions o;
      o.m = m;
      o.p_vol = pvol.value_or(c.p_vol);
      o.tol = c.nnls_tol;
      o.separate_homog_weights = separate_homog || c.separate_homog_weights;
      const EcmTraining t = train_ecm(set, basis, o);
      Manifest extra = provenance(set, c);
      extra["p_vol"] = fmt::format("{:.17g}", t.p_vol);
      write_cubature(model_out("ecm"), t.model, extra);
      fmt::print("points {}\nweight_sum {:.10g}\nmatrix_volume {:.10g}\nnnls_residual {:.6g}\n", t.model.m(),
                 t.model.xi.sum(), set.volumes.sum(), t.nnls.residual);
    };
  });

  std::optional<double> pstrain;
  std::optional<int> max_iter;
  bool verbose_lbfgs = false;
  auto* e3c_cmd = app.add_subcommand("train-e3c", "train an E3C model (clustering plus empirical correction)");
  add_training(e3c_cmd, true);
  e3c_cmd->add_option("--pstrain", pstrain, "strain penalty (default E^2)");
  e3c_cmd->add_option("--max-iter", max_iter, "L-BFGS iteration budget");
  e3c_cmd->add_flag("--verbose", verbose_lbfgs, "print L-BFGS progress");
  e3c_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      const SnapshotSet set = training_set(snapshots, train_paths.value_or(c.train_paths));
      const ModeBasis basis = basis_for(basis_file, set, d, d_given());
      E3cOptions o;
      o.m = m;
      o.seed = c.seed;
      o.p_strain = pstrain.value_or(c.p_strain);
      o.lbfgs.max_iter = max_iter.value_or(c.lbfgs_max_iter);
      o.lbfgs.grad_tol = c.lbfgs_grad_tol;
      o.lbfgs.verbose = verbose_lbfgs;
      const E3cTraining t = build_e3c_model(basis, set, o);
      write_cubature(model_out("e3c"), t.model, provenance(set, c));
      fmt::print("points {}\nobjective_initial {:.6g}\nobjective_corrected {:.6g}\nlbfgs_iterations {}\nconverged {}\n",
                 t.model.m(), t.initial.total(), t.corrected.total(), t.optimizer.iterations, t.optimizer.converged);
      for (const auto& [name, terms] : {std::pair{"initial", t.initial}, std::pair{"corrected", t.corrected}})
        fmt::print("terms_{} work={:.6g} stress={:.6g} strain={:.6g}\n", name, terms.work, terms.stress, terms.strain);
    };
  });

  auto* emsl_cmd = app.add_subcommand("train-emsl", "train an EMSL model");
  add_training(emsl_cmd, true);
  emsl_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      const SnapshotSet set = training_set(snapshots, train_paths.value_or(c.train_paths));
      const ModeBasis basis = basis_for(basis_file, set, d, d_given());
      EmslOptions o;
      o.m = m;
      o.seed = c.seed;
      const EmslTraining t = train_emsl(basis, set, o);
      write_emsl(model_out("emsl"), t.model, provenance(set, c));
      fmt::print("clusters {}\nmap_residual {:.6g}\nmap_condition {:.6g}\nregularized {}\n", t.model.m(),
                 t.map.residual, t.map.condition, t.map.regularized);
    };
  });

  // validate
  std::string model_file;
  auto* val_cmd = app.add_subcommand("validate", "validate one model against FOM results");
  val_cmd->add_option("--model", model_file, "model directory")->required()->check(CLI::ExistingDirectory);
  val_cmd->add_option("--snapshots", snapshots, "FOM store over the validation paths")->required();
  val_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      Manifest man;
      const OnlineModel model = read_online_model(model_file, man);
      const SnapshotSet val = read_store(snapshots);
      if (man.count("mesh_hash") && man.at("mesh_hash") != fmt::format("{}", val.mesh_hash))
        raise(ErrorKind::DimensionMismatch, "model and validation store were built on different meshes");
      ValidationOptions o;
      o.online = online_options(c);
      o.repeats = c.timing_repeats;
      ValidationReport report;
      report.seed = val.seed;
      report.mesh_hash = val.mesh_hash;
      report.config_hash = config_hash(c);
      for (Eigen::Index j = 0; j < val.cols(); ++j) {
        report.fom_seconds += val.fom_seconds(j);
        if (val.Pbar.col(j).norm() > 0.0) ++report.samples;
      }
      report.rows.push_back(run_validation(model, material_of(man, c.material), val, o));
      const fs::path dir = out_dir(g, "validation");
      write_report(report, dir);
      std::ofstream(dir / "report.json") << report_to_json(report);
      std::cout << summary_text(report);
      if (report.rows.front().failed) throw Error(ErrorKind::RomDivergence, report.rows.front().failure);
    };
  });

  // sweep
  bool plot = false, quiet = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "train and validate every (method, d, m) cell");
  sweep_cmd->add_option("--snapshots", snapshots, "FOM store over all validation paths (created if missing)");
  sweep_cmd->add_flag("--plot", plot, "also write SVG charts");
  sweep_cmd->add_flag("--quiet", quiet, "no per-cell progress");
  sweep_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      const SnapshotSet val = validation_store(c, snapshots, !quiet);
      const SnapshotSet train = val.first_paths(c.train_paths);
      const ValidationReport report = sweep(c, train, val, !quiet);
      const fs::path dir = out_dir(g, "sweep");
      write_report(report, dir, plot);
      std::ofstream(dir / "report.json") << report_to_json(report);
      std::cout << summary_text(report);
    };
  });

  // report
  std::string report_file;
  auto* report_cmd = app.add_subcommand("report", "write CSV tables (and charts) from a report.json");
  report_cmd->add_option("--input", report_file, "report.json from sweep or validate")->required()->check(CLI::ExistingFile);
  report_cmd->add_flag("--plot", plot, "also write SVG charts");
  report_cmd->callback([&] {
    action = [&] {
      std::ifstream in(report_file);
      std::stringstream buf;
      buf << in.rdbuf();
      const ValidationReport report = report_from_json(buf.str());
      write_report(report, out_dir(g, "report"), plot);
      std::cout << summary_text(report);
    };
  });

  // stress-field
  std::string sf_fbar;
  int sf_steps = 8;
  auto* sf_cmd = app.add_subcommand("stress-field", "von Mises field from a reduced solution vs the FOM");
  sf_cmd->add_option("--model", model_file, "ECM, E3C or EMSL model directory")->required()->check(CLI::ExistingDirectory);
  sf_cmd->add_option("--basis", basis_file, "POD basis written by train-pod")->required()->check(CLI::ExistingDirectory);
  sf_cmd->add_option("--fbar", sf_fbar, "target Fbar, 9 values row-major")->required();
  sf_cmd->add_option("--steps", sf_steps, "ramp steps from I")->check(CLI::PositiveNumber);
  sf_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      Manifest man;
      const OnlineModel model = read_online_model(model_file, man);
      const Material mat = material_of(man, c.material);
      const ModeBasis basis = read_basis(basis_file);
      const auto steps = linear_path(parse_voigt(sf_fbar), sf_steps);

      Eigen::VectorXd y = Eigen::VectorXd::Zero(basis.d());
      for (const auto& F : steps) {
        if (const auto* cub = std::get_if<CubatureModel>(&model)) y = newton_solve(*cub, mat, F, y).y;
        else y = emsl_step(std::get<EmslModel>(model), mat, F, y).y;
      }
      const auto rom = local_stress_field(basis, mat, steps.back(), y);

      const Mesh mesh = build_mesh(c);
      FomSolver solver(mesh, mat);
      FomState state = solver.reference_state();
      for (const auto& F : steps) state = solver.solve_increment(F, state);
      const auto cmp = compare_stress_fields(rom, von_mises_field(mat, state.F));

      const fs::path dir = out_dir(g, ".");
      std::ofstream csv(dir / "stress_field.csv");
      csv << "gauss;x;y;z;von_mises_rom;von_mises_fom;abs_error\n";
      for (std::size_t k = 0; k < rom.size(); ++k) {
        const auto& X = solver.gauss().points[k].X;
        csv << fmt::format("{};{:.6g};{:.6g};{:.6g};{:.6g};{:.6g};{:.6g}\n", k, X.x(), X.y(), X.z(), cmp.rom[k],
                           cmp.fom[k], cmp.abs_error[k]);
      }
      fmt::print("max_von_mises_fom {:.6g}\nmax_rel_error_top_decile {:.6g}\n", cmp.max_fom, cmp.max_error_hotspots);
    };
  });

  // emsl-run
  std::string run_path;
  auto* run_cmd = app.add_subcommand("emsl-run", "run an EMSL model along a load path");
  run_cmd->add_option("--model", model_file, "EMSL model directory")->required()->check(CLI::ExistingDirectory);
  run_cmd->add_option("--path", run_path, "file with one Fbar (9 values) per line")->required()->check(CLI::ExistingFile);
  run_cmd->callback([&] {
    action = [&] {
      const Config c = load(g);
      Manifest man;
      const EmslModel model = read_emsl(model_file, &man);
      const Material mat = material_of(man, c.material);
      const auto steps = read_path_file(run_path);
      std::ostringstream csv;
      csv << "step;seconds" << voigt_header("P") << tangent_header() << '\n';
      Eigen::VectorXd y = Eigen::VectorXd::Zero(model.d);
      for (std::size_t k = 0; k < steps.size(); ++k) {
        const EmslStepResult r = c.emsl_passes > 1 ? emsl_fixed_point(model, mat, steps[k], y, c.emsl_passes, c.emsl_tol)
                                                   : emsl_step(model, mat, steps[k], y);
        y = r.y;
        csv << fmt::format("{};{:.6g}", k + 1, r.seconds) << csv_values(r.Pbar.transpose()) << csv_values(r.Abar)
            << '\n';
      }
      if (g.out.empty()) {
        std::cout << csv.str();
      } else {
        const fs::path dir = out_dir(g, ".");
        std::ofstream(dir / "emsl_run.csv") << csv.str();
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    action();
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::ConfigError:
      case ErrorKind::IoError:
      case ErrorKind::FormatVersionMismatch:
      case ErrorKind::ChecksumMismatch:
      case ErrorKind::MissingStressSnapshots:
      case ErrorKind::DimensionMismatch:
      case ErrorKind::EmptyMatrix:
      case ErrorKind::DisconnectedMatrix:
      case ErrorKind::UnmatchedBoundaryNode:
        return kExitConfig;
      default:
        return kExitNumerical;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
