// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cstring>
#include <iterator>

#include "strainrom/error.hpp"
#include "strainrom/store.hpp"
#include "support.hpp"

using namespace strainrom;
using namespace testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("strainrom_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<unsigned char> slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& file, const std::vector<unsigned char>& bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Bitwise reflected CRC-32 (polynomial 0xEDB88320).
std::uint32_t crc32_bitwise(const unsigned char* p, std::size_t n) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= p[i];
    for (int b = 0; b < 8; ++b) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

std::uint64_t le(const std::vector<unsigned char>& b, std::size_t off, int bytes) {
  std::uint64_t v = 0;
  for (int k = bytes - 1; k >= 0; --k) v = (v << 8) | b[off + k];
  return v;
}

ErrorKind read_error(const fs::path& file) {
  try {
    read_matrix(file);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::EmptyMatrix;
}

}  // namespace

TEST_CASE("load paths") {
  const auto a = generate_load_paths(7, 20, 8, 0.025, 0.015);
  const auto b = generate_load_paths(7, 20, 8, 0.025, 0.015);
  const auto c = generate_load_paths(8, 20, 8, 0.025, 0.015);
  REQUIRE(a.size() == 20);
  int columns = 0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    columns += a[p].n_steps();
    CHECK(a[p].fbar == b[p].fbar);
    CHECK(a[p].fbar.back() != c[p].fbar.back());
    CHECK(a[p].direction_lp.norm() == doctest::Approx(1.0).epsilon(1e-14));
    VoigtVec9 prev = voigt_identity();
    for (int k = 0; k < a[p].n_steps(); ++k) {
      CHECK(a[p].directions_ls[k].norm() == doctest::Approx(1.0).epsilon(1e-14));
      const VoigtVec9 step = 0.025 * a[p].direction_lp + 0.015 * a[p].directions_ls[k];
      CHECK((a[p].fbar[k] - prev - step).norm() < 1e-15);
      prev = a[p].fbar[k];
    }
  }
  CHECK(columns == 160);

  for (const auto& path : generate_load_paths(1, 3, 5, 0.0, 0.0))
    for (const auto& F : path.fbar) CHECK(F == voigt_identity());
  CHECK_THROWS_AS(generate_load_paths(1, 1, 0, 0.1, 0.1), Error);
  CHECK_THROWS_AS(generate_load_paths(1, 1, 3, -0.1, 0.1), Error);
}

TEST_CASE("snapshots on a solid cell have zero fluctuation") {
  const SnapshotSet set = small_snapshots(solid_cell(2), neo_hooke(), 1, 8, 3);
  CHECK(set.cols() == 8);
  CHECK(set.fluctuations().norm() < 1e-10);
  CHECK(set.has_stresses());
  CHECK(set.cell_volume == 8.0);
}

TEST_CASE("collected columns are ordered and reproducible") {
  const Mesh mesh = porous_cell();
  const auto paths = generate_load_paths(5, 3, 3, 0.025, 0.015);
  CollectOptions one, two;
  two.threads = 2;
  const SnapshotSet a = collect_snapshots(paths, mesh, neo_hooke(), one);
  const SnapshotSet b = collect_snapshots(paths, mesh, neo_hooke(), two);
  REQUIRE(a.cols() == 9);
  CHECK(a.F == b.F);
  CHECK(a.Pbar == b.Pbar);
  CHECK(!a.has_stresses());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    CHECK(a.path_index[j] == j / 3);
    CHECK(a.step_index[j] == j % 3);
    CHECK(a.Fbar.col(j) == paths[j / 3].fbar[j % 3]);
  }
  CHECK(a.paths() == std::vector<int>{0, 1, 2});
  const SnapshotSet first = a.first_paths(2);
  CHECK(first.cols() == 6);
  CHECK(first.F == a.F.leftCols(6));

  // Re-solving the first path reproduces the stored columns.
  FomSolver solver(mesh, neo_hooke());
  FomState s = solver.reference_state();
  for (int k = 0; k < 3; ++k) {
    s = solver.solve_increment(paths[0].fbar[k], s);
    CHECK((gauss_strains(s) - a.F.col(k)).norm() < 1e-12);
  }
}

TEST_CASE("failed paths are dropped unless strict") {
  const Mesh mesh = porous_cell();
  auto paths = generate_load_paths(5, 2, 2, 0.025, 0.015);
  VoigtVec9 inverted = voigt_identity();
  inverted(0) = -0.5;
  paths[0].fbar[1] = inverted;
  const SnapshotSet set = collect_snapshots(paths, mesh, neo_hooke());
  CHECK(set.cols() == 2);
  CHECK(set.failures.size() == 1);
  CHECK(set.path_index == std::vector<int>{1, 1});
  CollectOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(collect_snapshots(paths, mesh, neo_hooke(), strict), Error);
}

TEST_CASE("matrix file layout is little-endian with a CRC32 trailer") {
  const fs::path dir = scratch("layout");
  Eigen::MatrixXd m(2, 3);
  m << 1.5, -2.0, 3.25, 0.0, 1e-300, -7.0;
  write_matrix(dir / "m.bin", m);
  const auto bytes = slurp(dir / "m.bin");
  REQUIRE(bytes.size() == 8 + 4 + 8 + 8 + 6 * 8 + 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "EMSLSNAP");
  CHECK(le(bytes, 8, 4) == 1);
  CHECK(le(bytes, 12, 8) == 2);
  CHECK(le(bytes, 20, 8) == 3);
  // Column-major: the second value is m(1, 0) = 0.0, the third m(0, 1) = -2.0.
  double v;
  const std::uint64_t raw = le(bytes, 28 + 16, 8);
  std::memcpy(&v, &raw, 8);
  CHECK(v == -2.0);
  CHECK(le(bytes, bytes.size() - 4, 4) == crc32_bitwise(bytes.data(), bytes.size() - 4));
  CHECK(read_matrix(dir / "m.bin") == m);
}

TEST_CASE("corrupted files are rejected") {
  const fs::path dir = scratch("corrupt");
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd m = random_matrix(rng, 5, 4);
  write_matrix(dir / "m.bin", m);
  const auto good = slurp(dir / "m.bin");

  auto truncated = good;
  truncated.resize(good.size() - 9);
  spit(dir / "t.bin", truncated);
  CHECK(read_error(dir / "t.bin") == ErrorKind::ChecksumMismatch);

  for (std::size_t pos : {std::size_t{30}, good.size() / 2, good.size() - 5}) {
    auto flipped = good;
    flipped[pos] ^= 0x10;
    spit(dir / "f.bin", flipped);
    CHECK(read_error(dir / "f.bin") == ErrorKind::ChecksumMismatch);
  }

  auto magic = good;
  magic[0] = 'X';
  spit(dir / "g.bin", magic);
  CHECK(read_error(dir / "g.bin") == ErrorKind::FormatVersionMismatch);

  auto version = good;
  version[8] = 2;
  spit(dir / "v.bin", version);
  CHECK(read_error(dir / "v.bin") == ErrorKind::FormatVersionMismatch);
  CHECK(read_error(dir / "missing.bin") == ErrorKind::IoError);
}

TEST_CASE("snapshot store round trip is bit-identical") {
  const fs::path dir = scratch("store");
  SnapshotSet set = small_snapshots(porous_cell(), neo_hooke(), 2, 2, 9);
  set.seed = 9;
  set.failures.push_back("path 7 step 1: synthetic");
  write_store(set, dir / "s");
  const SnapshotSet back = read_store(dir / "s");
  CHECK(back.F == set.F);
  CHECK(back.P == set.P);
  CHECK(back.Fbar == set.Fbar);
  CHECK(back.Pbar == set.Pbar);
  CHECK(back.volumes == set.volumes);
  CHECK(back.fom_seconds == set.fom_seconds);
  CHECK(back.path_index == set.path_index);
  CHECK(back.step_index == set.step_index);
  CHECK(back.cell_volume == set.cell_volume);
  CHECK(back.seed == 9);
  CHECK(back.mesh_hash == set.mesh_hash);
  CHECK(back.material.kind == set.material.kind);
  CHECK(back.failures == set.failures);

  fs::remove(dir / "s" / "Pbar.bin");
  CHECK_THROWS_AS(read_store(dir / "s"), Error);
}
