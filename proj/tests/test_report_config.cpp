// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "strainrom/config.hpp"
#include "strainrom/error.hpp"
#include "strainrom/report.hpp"
#include "strainrom/stress_field.hpp"
#include "support.hpp"

using namespace strainrom;
using namespace testing;
namespace fs = std::filesystem;

namespace {

ValidationReport random_report(std::mt19937_64& rng, int rows) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> coarse(0, 4);
  ValidationReport r;
  r.seed = 42;
  r.mesh_hash = 0xfeedfacecafebeefull;
  r.config_hash = 17;
  r.samples = 320;
  r.fom_seconds = 12.5;
  r.skipped = {"ECM d=20 m=1: rank"};
  const char* methods[] = {"ECM", "E3C", "EMSL"};
  for (int k = 0; k < rows; ++k) {
    ValidationRow row;
    row.method = methods[k % 3];
    row.d = 9 + k;
    row.m = 1 + 2 * k;
    row.points = row.m;
    // Coarse values so that ties occur.
    row.mean_error = coarse(rng) + 0.5;
    row.online_seconds = coarse(rng) * 0.1 + 0.05;
    row.relative_runtime = u(rng);
    row.train_seconds = u(rng);
    row.failed = k % 5 == 4;
    if (row.failed) {
      row.mean_error = std::numeric_limits<double>::quiet_NaN();
      row.divergences = 2;
      row.failure = "path 3 step 1: RomDivergence";
    }
    row.sample_errors = {u(rng), u(rng)};
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace

TEST_CASE("property: Pareto front matches the brute-force non-dominated set") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const ValidationReport r = random_report(rng, 3 + trial % 10);
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto& a = r.rows[i];
      if (a.failed) continue;
      bool dominated = false;
      for (const auto& b : r.rows) {
        if (b.failed) continue;
        const bool no_worse = b.mean_error <= a.mean_error && b.online_seconds <= a.online_seconds;
        const bool better = b.mean_error < a.mean_error || b.online_seconds < a.online_seconds;
        dominated = dominated || (no_worse && better);
      }
      if (!dominated) expect.push_back(i);
    }
    CHECK(pareto_front(r.rows) == expect);
  }
}

TEST_CASE("tables and JSON round trip") {
  std::mt19937_64 rng(2);
  const ValidationReport r = random_report(rng, 7);
  const std::string csv = errors_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "method;d;m;points;mean_error_percent;failed;divergences");
  int n = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ';') == 6);
    ++n;
  }
  CHECK(n == 7);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(errors_csv(r).find("ECM;9;1;1;") == 0 + std::string("method;d;m;points;mean_error_percent;failed;divergences\n").size());

  const ValidationReport back = report_from_json(report_to_json(r));
  CHECK(back.seed == r.seed);
  CHECK(back.mesh_hash == r.mesh_hash);
  CHECK(back.skipped == r.skipped);
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    CHECK(back.rows[k].method == r.rows[k].method);
    CHECK(back.rows[k].failed == r.rows[k].failed);
    CHECK(back.rows[k].online_seconds == r.rows[k].online_seconds);
    CHECK(back.rows[k].sample_errors == r.rows[k].sample_errors);
    if (r.rows[k].failed)
      CHECK(std::isnan(back.rows[k].mean_error));
    else
      CHECK(back.rows[k].mean_error == r.rows[k].mean_error);
  }
  CHECK(errors_csv(back) == errors_csv(r));
  CHECK_THROWS_AS(report_from_json("{\"rows\": 3}"), Error);

  const fs::path dir = fs::temp_directory_path() / "strainrom_test_report";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_report(r, dir, true);
  for (const char* f : {"errors.csv", "runtimes.csv", "pareto.csv", "summary.txt", "errors_vs_m.svg", "pareto.svg"})
    CHECK(fs::exists(dir / f));
  std::ifstream svg(dir / "pareto.svg");
  std::string first;
  std::getline(svg, first);
  CHECK(first.find("<svg") != std::string::npos);
}

TEST_CASE("configuration round trip and errors") {
  Config c;
  apply_setting(c, "material.kind", "linear-elastic");
  apply_setting(c, "material.E", "250.5");
  apply_setting(c, "rve.n_voxels", "6");
  apply_setting(c, "rve.pores", "0.5 0.5 0.5 0.3; 1.5 1.5 1.5 0.2");
  apply_setting(c, "sweep.m", "2,4,8");
  apply_setting(c, "sweep.methods", "EMSL");
  apply_setting(c, "ecm.separate_homog_weights", "true");
  apply_setting(c, "sampling.dfls", "0.0125");
  const Config back = parse_config(dump_config(c));
  CHECK(dump_config(back) == dump_config(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.material.kind == MaterialKind::LinearElastic);
  CHECK(back.material.E == 250.5);
  CHECK(back.pores.size() == 2);
  CHECK(back.m_list == std::vector<int>{2, 4, 8});
  CHECK(back.separate_homog_weights);
  CHECK(back.dF_ls == 0.0125);
  CHECK(config_hash(Config{}) != config_hash(c));

  const Config parsed = parse_config("# comment\n rve.n_voxels = 4 \n\nsweep.d=3\n");
  CHECK(parsed.n_voxels == 4);
  CHECK(parsed.d_list == std::vector<int>{3});

  auto kind = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind("no.such.key = 1") == ErrorKind::ConfigError);
  CHECK(kind("rve.n_voxels = abc") == ErrorKind::ConfigError);
  CHECK(kind("rve.n_voxels = 1") == ErrorKind::ConfigError);
  CHECK(kind("sweep.methods = FOO") == ErrorKind::ConfigError);
  CHECK(kind("just text") == ErrorKind::ConfigError);
  CHECK(kind("rve.pores = 1 2 3") == ErrorKind::ConfigError);
  CHECK(kind("ecm.separate_homog_weights = maybe") == ErrorKind::ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/strainrom.cfg"), Error);

  Config empty_pores;
  apply_setting(empty_pores, "rve.pores", "");
  CHECK(empty_pores.pores.empty());
}

TEST_CASE("stress measures") {
  std::mt19937_64 rng(3);
  const VoigtVec9 F = random_F(rng);
  const VoigtVec9 P = pk1_stress(neo_hooke(), F);
  const Tensor2 Fm = voigt_decode(F);
  const Tensor2 sigma = cauchy_stress(P, F);
  CHECK((sigma - sigma.transpose()).norm() < 1e-10 * sigma.norm());
  CHECK((sigma * Fm.inverse().transpose() * Fm.determinant() - voigt_decode(P)).norm() < 1e-10 * P.norm());

  Tensor2 uni = Tensor2::Zero();
  uni(0, 0) = 3.0;
  CHECK(von_mises(uni) == doctest::Approx(3.0));
  CHECK(von_mises(Tensor2::Identity() * 5.0) == doctest::Approx(0.0).epsilon(1e-12));
  Tensor2 shear = Tensor2::Zero();
  shear(0, 1) = shear(1, 0) = 2.0;
  CHECK(von_mises(shear) == doctest::Approx(2.0 * std::sqrt(3.0)));

  ModeBasis basis;
  basis.psi = 0.05 * random_matrix(rng, 9 * 6, 2);
  const Eigen::VectorXd y = random_matrix(rng, 2, 1);
  const auto field = local_stress_field(basis, neo_hooke(), F, y);
  const auto recon = reconstruct_field(basis, y, F);
  const auto direct = von_mises_field(neo_hooke(), recon);
  REQUIRE(field.size() == 6);
  for (std::size_t g = 0; g < 6; ++g) {
    CHECK(field[g] == doctest::Approx(direct[g]).epsilon(1e-14));
    CHECK(field[g] == doctest::Approx(von_mises(cauchy_stress(pk1_stress(neo_hooke(), recon[g]), recon[g]))).epsilon(1e-14));
  }

  std::vector<double> fom(20), rom(20);
  for (int g = 0; g < 20; ++g) {
    fom[g] = g + 1.0;
    rom[g] = fom[g];
  }
  rom[19] = 22.0;  // top decile, 10 % off
  rom[0] = 5.0;    // outside the hot spots
  const StressFieldComparison cmp = compare_stress_fields(rom, fom);
  CHECK(cmp.max_fom == 20.0);
  CHECK(cmp.max_error_hotspots == doctest::Approx(0.1));
  CHECK(cmp.abs_error[0] == 4.0);
}
