// SPDX-License-Identifier: Apache-2.0
#include "strainrom/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof())
    raise(ErrorKind::ConfigError, fmt::format("{}: cannot parse '{}'", key, value));
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  raise(ErrorKind::ConfigError, fmt::format("{}: expected a boolean, got '{}'", key, value));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split(value, ',')) out.push_back(parse_number<int>(key, item));
  if (out.empty()) raise(ErrorKind::ConfigError, fmt::format("{}: empty list", key));
  return out;
}

std::vector<Pore> parse_pores(const std::string& key, const std::string& value) {
  std::vector<Pore> pores;
  for (const auto& item : split(value, ';')) {
    std::istringstream in(item);
    Pore p;
    in >> p.center.x() >> p.center.y() >> p.center.z() >> p.radius;
    if (in.fail() || !(in >> std::ws).eof() || p.radius < 0.0)
      raise(ErrorKind::ConfigError, fmt::format("{}: pore '{}' must read 'x y z r' with r >= 0", key, item));
    pores.push_back(p);
  }
  return pores;
}

}  // namespace

void apply_setting(Config& c, const std::string& key, const std::string& value) {
  if (key == "material.kind") c.material.kind = parse_material_kind(value);
  else if (key == "material.E") c.material.E = parse_number<double>(key, value);
  else if (key == "material.nu") c.material.nu = parse_number<double>(key, value);
  else if (key == "rve.n_voxels") c.n_voxels = parse_number<int>(key, value);
  else if (key == "rve.edge_length") c.edge_length = parse_number<double>(key, value);
  else if (key == "rve.pores") c.pores = parse_pores(key, value);
  else if (key == "sampling.seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "sampling.train_paths") c.train_paths = parse_number<int>(key, value);
  else if (key == "sampling.validation_paths") c.validation_paths = parse_number<int>(key, value);
  else if (key == "sampling.steps") c.steps = parse_number<int>(key, value);
  else if (key == "sampling.dflp") c.dF_lp = parse_number<double>(key, value);
  else if (key == "sampling.dfls") c.dF_ls = parse_number<double>(key, value);
  else if (key == "sweep.d") c.d_list = parse_int_list(key, value);
  else if (key == "sweep.m") c.m_list = parse_int_list(key, value);
  else if (key == "sweep.methods") c.methods = split(value, ',');
  else if (key == "ecm.pvol") c.p_vol = parse_number<double>(key, value);
  else if (key == "ecm.tol") c.nnls_tol = parse_number<double>(key, value);
  else if (key == "ecm.separate_homog_weights") c.separate_homog_weights = parse_bool(key, value);
  else if (key == "e3c.pstrain") c.p_strain = parse_number<double>(key, value);
  else if (key == "e3c.max_iter") c.lbfgs_max_iter = parse_number<int>(key, value);
  else if (key == "e3c.grad_tol") c.lbfgs_grad_tol = parse_number<double>(key, value);
  else if (key == "emsl.passes") c.emsl_passes = parse_number<int>(key, value);
  else if (key == "emsl.tol") c.emsl_tol = parse_number<double>(key, value);
  else if (key == "run.threads") c.threads = parse_number<int>(key, value);
  else if (key == "run.timing_repeats") c.timing_repeats = parse_number<int>(key, value);
  else raise(ErrorKind::ConfigError, fmt::format("unknown configuration key '{}'", key));
}

Config parse_config(const std::string& text, Config base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) raise(ErrorKind::ConfigError, fmt::format("line {}: expected key = value", lineno));
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.material.validate();
  if (base.n_voxels < 2) raise(ErrorKind::ConfigError, "rve.n_voxels must be at least 2");
  if (!(base.edge_length > 0.0)) raise(ErrorKind::ConfigError, "rve.edge_length must be positive");
  if (base.train_paths < 1 || base.validation_paths < 1 || base.steps < 1)
    raise(ErrorKind::ConfigError, "path and step counts must be positive");
  for (const auto& m : base.methods)
    if (m != "ECM" && m != "E3C" && m != "EMSL") raise(ErrorKind::ConfigError, fmt::format("unknown method '{}'", m));
  return base;
}

Config load_config(const std::filesystem::path& file, Config base) {
  std::ifstream in(file);
  if (!in) raise(ErrorKind::ConfigError, fmt::format("cannot read config file {}", file.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string dump_config(const Config& c) {
  std::string pores;
  for (const auto& p : c.pores)
    pores += fmt::format("{}{:.17g} {:.17g} {:.17g} {:.17g}", pores.empty() ? "" : "; ", p.center.x(), p.center.y(),
                         p.center.z(), p.radius);
  std::string out;
  auto put = [&out](const char* key, const std::string& v) { out += fmt::format("{} = {}\n", key, v); };
  put("material.kind", std::string(to_string(c.material.kind)));
  put("material.E", fmt::format("{:.17g}", c.material.E));
  put("material.nu", fmt::format("{:.17g}", c.material.nu));
  put("rve.n_voxels", fmt::format("{}", c.n_voxels));
  put("rve.edge_length", fmt::format("{:.17g}", c.edge_length));
  put("rve.pores", pores);
  put("sampling.seed", fmt::format("{}", c.seed));
  put("sampling.train_paths", fmt::format("{}", c.train_paths));
  put("sampling.validation_paths", fmt::format("{}", c.validation_paths));
  put("sampling.steps", fmt::format("{}", c.steps));
  put("sampling.dflp", fmt::format("{:.17g}", c.dF_lp));
  put("sampling.dfls", fmt::format("{:.17g}", c.dF_ls));
  put("sweep.d", fmt::format("{}", fmt::join(c.d_list, ",")));
  put("sweep.m", fmt::format("{}", fmt::join(c.m_list, ",")));
  put("sweep.methods", fmt::format("{}", fmt::join(c.methods, ",")));
  put("ecm.pvol", fmt::format("{:.17g}", c.p_vol));
  put("ecm.tol", fmt::format("{:.17g}", c.nnls_tol));
  put("ecm.separate_homog_weights", c.separate_homog_weights ? "1" : "0");
  put("e3c.pstrain", fmt::format("{:.17g}", c.p_strain));
  put("e3c.max_iter", fmt::format("{}", c.lbfgs_max_iter));
  put("e3c.grad_tol", fmt::format("{:.17g}", c.lbfgs_grad_tol));
  put("emsl.passes", fmt::format("{}", c.emsl_passes));
  put("emsl.tol", fmt::format("{:.17g}", c.emsl_tol));
  put("run.threads", fmt::format("{}", c.threads));
  put("run.timing_repeats", fmt::format("{}", c.timing_repeats));
  return out;
}

std::uint64_t config_hash(const Config& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Mesh build_mesh(const Config& c) { return build_rve(c.n_voxels, c.pores, c.edge_length); }

}  // namespace strainrom
