// SPDX-License-Identifier: Apache-2.0
#include "strainrom/model_io.hpp"

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace fs = std::filesystem;

namespace {

void prepare(const fs::path& dir, Manifest& m, const std::string& type) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(ErrorKind::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  m["format"] = "strainrom-model";
  m["format_version"] = fmt::format("{}", kStoreVersion);
  m["type"] = type;
  write_manifest(dir / "manifest.txt", m);
}

Manifest open_model(const fs::path& dir, std::initializer_list<const char*> types, Manifest* out) {
  Manifest m = read_manifest(dir / "manifest.txt");
  const auto it = m.find("type");
  if (m["format"] != "strainrom-model" || it == m.end())
    raise(ErrorKind::FormatVersionMismatch, fmt::format("{} is not a model directory", dir.string()));
  if (m["format_version"] != fmt::format("{}", kStoreVersion))
    raise(ErrorKind::FormatVersionMismatch, fmt::format("{}: unsupported model version", dir.string()));
  bool ok = false;
  for (const char* t : types) ok |= it->second == t;
  if (!ok) raise(ErrorKind::FormatVersionMismatch, fmt::format("{} holds a {} model", dir.string(), it->second));
  if (out) *out = m;
  return m;
}

Eigen::MatrixXd hstack(const std::vector<ModeSlice>& blocks, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd out(rows, cols * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k) out.middleCols(cols * static_cast<Eigen::Index>(k), cols) = blocks[k];
  return out;
}

std::vector<ModeSlice> hsplit(const Eigen::MatrixXd& m, Eigen::Index cols) {
  std::vector<ModeSlice> out;
  if (cols == 0) return out;
  for (Eigen::Index k = 0; k < m.cols() / cols; ++k) out.emplace_back(m.middleCols(cols * k, cols));
  return out;
}

int as_int(const Manifest& m, const char* key) {
  const auto it = m.find(key);
  if (it == m.end()) raise(ErrorKind::FormatVersionMismatch, fmt::format("model manifest lacks '{}'", key));
  return std::stoi(it->second);
}

double as_double(const Manifest& m, const char* key) {
  const auto it = m.find(key);
  if (it == m.end()) raise(ErrorKind::FormatVersionMismatch, fmt::format("model manifest lacks '{}'", key));
  return std::stod(it->second);
}

}  // namespace

void write_basis(const fs::path& dir, const ModeBasis& basis, Manifest extra) {
  extra["d"] = fmt::format("{}", basis.d());
  extra["gauss_points"] = fmt::format("{}", basis.n_gauss());
  prepare(dir, extra, "POD");
  write_matrix(dir / "psi.bin", basis.psi);
  write_matrix(dir / "sigma.bin", basis.sigma);
}

ModeBasis read_basis(const fs::path& dir, Manifest* manifest) {
  open_model(dir, {"POD"}, manifest);
  ModeBasis b;
  b.psi = read_matrix(dir / "psi.bin");
  b.sigma = read_matrix(dir / "sigma.bin");
  return b;
}

void write_cubature(const fs::path& dir, const CubatureModel& model, Manifest extra) {
  extra["d"] = fmt::format("{}", model.d);
  extra["m"] = fmt::format("{}", model.m());
  extra["cell_volume"] = fmt::format("{:.17g}", model.cell_volume);
  extra["separate_homog_weights"] = model.xi_hom.size() ? "1" : "0";
  prepare(dir, extra, model.kind);
  write_matrix(dir / "psi.bin", hstack(model.psi, 9, model.d));
  write_matrix(dir / "xi.bin", model.xi);
  if (model.xi_hom.size()) write_matrix(dir / "xi_hom.bin", model.xi_hom);
  Eigen::VectorXd idx(static_cast<Eigen::Index>(model.gauss_index.size()));
  for (std::size_t k = 0; k < model.gauss_index.size(); ++k) idx(static_cast<Eigen::Index>(k)) = model.gauss_index[k];
  write_matrix(dir / "gauss_index.bin", idx);
}

CubatureModel read_cubature(const fs::path& dir, Manifest* manifest) {
  const Manifest m = open_model(dir, {"ECM", "E3C", "POD-FULL"}, manifest);
  CubatureModel model;
  model.kind = m.at("type");
  model.d = as_int(m, "d");
  model.cell_volume = as_double(m, "cell_volume");
  model.psi = hsplit(read_matrix(dir / "psi.bin"), model.d);
  model.xi = read_matrix(dir / "xi.bin");
  if (m.count("separate_homog_weights") && m.at("separate_homog_weights") == "1")
    model.xi_hom = read_matrix(dir / "xi_hom.bin");
  const Eigen::MatrixXd idx = read_matrix(dir / "gauss_index.bin");
  for (Eigen::Index k = 0; k < idx.size(); ++k) model.gauss_index.push_back(static_cast<int>(idx(k)));
  if (static_cast<int>(model.psi.size()) != model.m() || model.m() != as_int(m, "m"))
    raise(ErrorKind::DimensionMismatch, fmt::format("{}: inconsistent point count", dir.string()));
  return model;
}

void write_emsl(const fs::path& dir, const EmslModel& model, Manifest extra) {
  extra["d"] = fmt::format("{}", model.d);
  extra["m"] = fmt::format("{}", model.m());
  extra["cell_volume"] = fmt::format("{:.17g}", model.cell_volume);
  prepare(dir, extra, "EMSL");
  write_matrix(dir / "psi.bin", hstack(model.psi, 9, model.d));
  write_matrix(dir / "psi_bar.bin", hstack(model.psi_bar, 9, model.d));
  write_matrix(dir / "xi.bin", model.xi);
  write_matrix(dir / "M.bin", model.M);
  const Eigen::Index n = 9 * static_cast<Eigen::Index>(model.d);
  Eigen::MatrixXd D(n, n * model.m());
  for (int c = 0; c < model.m(); ++c) D.middleCols(n * c, n) = model.D[c];
  write_matrix(dir / "D.bin", D);
}

EmslModel read_emsl(const fs::path& dir, Manifest* manifest) {
  const Manifest m = open_model(dir, {"EMSL"}, manifest);
  EmslModel model;
  model.d = as_int(m, "d");
  model.cell_volume = as_double(m, "cell_volume");
  model.psi = hsplit(read_matrix(dir / "psi.bin"), model.d);
  model.psi_bar = hsplit(read_matrix(dir / "psi_bar.bin"), model.d);
  model.xi = read_matrix(dir / "xi.bin");
  model.M = read_matrix(dir / "M.bin");
  const Eigen::MatrixXd D = read_matrix(dir / "D.bin");
  const Eigen::Index n = 9 * static_cast<Eigen::Index>(model.d);
  if (static_cast<int>(model.psi.size()) != model.m() || model.m() != as_int(m, "m") ||
      model.M.rows() != model.d || model.M.cols() != 9 || D.rows() != n || D.cols() != n * model.m())
    raise(ErrorKind::DimensionMismatch, fmt::format("{}: inconsistent EMSL model", dir.string()));
  for (int c = 0; c < model.m(); ++c) model.D.emplace_back(D.middleCols(n * c, n));
  emsl_prepare(model);
  return model;
}

std::string model_type(const fs::path& dir) {
  const Manifest m = read_manifest(dir / "manifest.txt");
  const auto it = m.find("type");
  if (it == m.end()) raise(ErrorKind::FormatVersionMismatch, fmt::format("{} has no model type", dir.string()));
  return it->second;
}

}  // namespace strainrom
