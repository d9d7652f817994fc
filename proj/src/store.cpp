// SPDX-License-Identifier: Apache-2.0
#include "strainrom/store.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <zlib.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'E', 'M', 'S', 'L', 'S', 'N', 'A', 'P'};

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get_le(const unsigned char* p) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::uint32_t crc32_of(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < n; off += kChunk)
    crc = crc32(crc, data + off, static_cast<uInt>(std::min(kChunk, n - off)));
  return static_cast<std::uint32_t>(crc);
}

std::string fmt_u64(std::uint64_t v) { return fmt::format("{}", v); }

template <typename Vec>
Eigen::MatrixXd as_row(const Vec& v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) m(0, static_cast<Eigen::Index>(k)) = v[k];
  return m;
}

const std::string& require(const Manifest& m, const std::string& key, const fs::path& where) {
  auto it = m.find(key);
  if (it == m.end()) raise(ErrorKind::FormatVersionMismatch, fmt::format("{}: missing key '{}'", where.string(), key));
  return it->second;
}

}  // namespace

void write_matrix(const fs::path& file, const Eigen::MatrixXd& m) {
  std::vector<unsigned char> buf;
  buf.reserve(36 + 8 * static_cast<std::size_t>(m.size()));
  buf.insert(buf.end(), kMagic, kMagic + 8);
  put_le<std::uint32_t>(buf, kStoreVersion);
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) put_le<double>(buf, m(r, c));
  put_le<std::uint32_t>(buf, crc32_of(buf.data(), buf.size()));

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::IoError, fmt::format("cannot write {}", file.string()));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) raise(ErrorKind::IoError, fmt::format("short write to {}", file.string()));
}

Eigen::MatrixXd read_matrix(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) raise(ErrorKind::IoError, fmt::format("cannot open {}", file.string()));
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t kHeader = 8 + 4 + 8 + 8;
  if (buf.size() < 12) raise(ErrorKind::ChecksumMismatch, fmt::format("{}: truncated header", file.string()));
  if (std::memcmp(buf.data(), kMagic, 8) != 0)
    raise(ErrorKind::FormatVersionMismatch, fmt::format("{}: bad magic", file.string()));
  const auto version = get_le<std::uint32_t>(buf.data() + 8);
  if (version != kStoreVersion)
    raise(ErrorKind::FormatVersionMismatch, fmt::format("{}: version {} (expected {})", file.string(), version, kStoreVersion));
  if (buf.size() < kHeader + 4) raise(ErrorKind::ChecksumMismatch, fmt::format("{}: truncated header", file.string()));

  const auto rows = get_le<std::uint64_t>(buf.data() + 12);
  const auto cols = get_le<std::uint64_t>(buf.data() + 20);
  const std::size_t expected = kHeader + 8 * rows * cols + 4;
  if (buf.size() != expected)
    raise(ErrorKind::ChecksumMismatch, fmt::format("{}: size {} bytes, expected {}", file.string(), buf.size(), expected));
  const auto stored = get_le<std::uint32_t>(buf.data() + expected - 4);
  if (stored != crc32_of(buf.data(), expected - 4))
    raise(ErrorKind::ChecksumMismatch, fmt::format("{}: CRC32 mismatch", file.string()));

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const unsigned char* p = buf.data() + kHeader;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r, p += 8) m(r, c) = get_le<double>(p);
  return m;
}

void write_manifest(const fs::path& file, const Manifest& manifest) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) raise(ErrorKind::IoError, fmt::format("cannot write {}", file.string()));
  for (const auto& [k, v] : manifest) out << k << '=' << v << '\n';
}

Manifest read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) raise(ErrorKind::IoError, fmt::format("cannot open {}", file.string()));
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

void write_store(const SnapshotSet& set, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(ErrorKind::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));

  Manifest m;
  m["format"] = "strainrom-snapshots";
  m["format_version"] = fmt::format("{}", kStoreVersion);
  m["columns"] = fmt::format("{}", set.cols());
  m["gauss_points"] = fmt::format("{}", set.n_gauss());
  m["has_stresses"] = set.has_stresses() ? "1" : "0";
  m["cell_volume"] = fmt::format("{:.17g}", set.cell_volume);
  m["seed"] = fmt_u64(set.seed);
  m["mesh_hash"] = fmt_u64(set.mesh_hash);
  m["material.kind"] = std::string(to_string(set.material.kind));
  m["material.E"] = fmt::format("{:.17g}", set.material.E);
  m["material.nu"] = fmt::format("{:.17g}", set.material.nu);
  m["failures"] = fmt::format("{}", set.failures.size());
  for (std::size_t k = 0; k < set.failures.size(); ++k) m[fmt::format("failure.{}", k)] = set.failures[k];
  write_manifest(dir / "manifest.txt", m);

  write_matrix(dir / "F.bin", set.F);
  write_matrix(dir / "Fbar.bin", set.Fbar);
  write_matrix(dir / "Pbar.bin", set.Pbar);
  write_matrix(dir / "volumes.bin", set.volumes);
  write_matrix(dir / "fom_seconds.bin", set.fom_seconds);
  Eigen::MatrixXd index(2, set.cols());
  index.row(0) = as_row(set.path_index);
  index.row(1) = as_row(set.step_index);
  write_matrix(dir / "columns.bin", index);
  if (set.has_stresses()) write_matrix(dir / "P.bin", set.P);
}

SnapshotSet read_store(const fs::path& dir) {
  const Manifest m = read_manifest(dir / "manifest.txt");
  if (require(m, "format", dir) != "strainrom-snapshots")
    raise(ErrorKind::FormatVersionMismatch, fmt::format("{}: not a snapshot store", dir.string()));
  if (std::stoul(require(m, "format_version", dir)) != kStoreVersion)
    raise(ErrorKind::FormatVersionMismatch, fmt::format("{}: unsupported store version", dir.string()));

  SnapshotSet set;
  set.cell_volume = std::stod(require(m, "cell_volume", dir));
  set.seed = std::stoull(require(m, "seed", dir));
  set.mesh_hash = std::stoull(require(m, "mesh_hash", dir));
  set.material.kind = parse_material_kind(require(m, "material.kind", dir));
  set.material.E = std::stod(require(m, "material.E", dir));
  set.material.nu = std::stod(require(m, "material.nu", dir));
  const auto n_failures = std::stoul(require(m, "failures", dir));
  for (std::size_t k = 0; k < n_failures; ++k) set.failures.push_back(require(m, fmt::format("failure.{}", k), dir));

  set.F = read_matrix(dir / "F.bin");
  set.Fbar = read_matrix(dir / "Fbar.bin");
  set.Pbar = read_matrix(dir / "Pbar.bin");
  set.volumes = read_matrix(dir / "volumes.bin");
  set.fom_seconds = read_matrix(dir / "fom_seconds.bin");
  const Eigen::MatrixXd index = read_matrix(dir / "columns.bin");
  for (Eigen::Index j = 0; j < index.cols(); ++j) {
    set.path_index.push_back(static_cast<int>(index(0, j)));
    set.step_index.push_back(static_cast<int>(index(1, j)));
  }
  if (require(m, "has_stresses", dir) == "1") set.P = read_matrix(dir / "P.bin");

  const auto s = set.cols();
  const bool consistent = set.F.cols() == s && set.Pbar.cols() == s && set.fom_seconds.size() == s &&
                          index.cols() == s && (!set.has_stresses() || set.P.cols() == s) &&
                          set.F.rows() == 9 * set.volumes.size();
  if (!consistent) raise(ErrorKind::DimensionMismatch, fmt::format("{}: inconsistent column counts", dir.string()));
  return set;
}

}  // namespace strainrom
