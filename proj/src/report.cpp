// SPDX-License-Identifier: Apache-2.0
#include "strainrom/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "strainrom/error.hpp"

namespace strainrom {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.6g}", v);
}

void write_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::IoError, fmt::format("cannot write {}", file.string()));
  out << text;
  if (!out) raise(ErrorKind::IoError, fmt::format("short write to {}", file.string()));
}

bool dominates(const ValidationRow& a, const ValidationRow& b) {
  return a.mean_error <= b.mean_error && a.online_seconds <= b.online_seconds &&
         (a.mean_error < b.mean_error || a.online_seconds < b.online_seconds);
}

const char* colour(const std::string& method) {
  if (method == "ECM") return "#1f77b4";
  if (method == "E3C") return "#ff7f0e";
  return "#2ca02c";
}

struct Axis {
  double lo, hi;
  bool log;
  [[nodiscard]] double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  double lo = 1e300, hi = -1e300;
  for (double v : values)
    if (std::isfinite(v) && (!log || v > 0.0)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (lo > hi) lo = log ? 0.1 : 0.0, hi = 1.0;
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (hi <= lo) hi = lo * 10.0;
  } else if (hi <= lo) {
    hi = lo + 1.0;
  }
  return {lo, hi, log};
}

// Scatter chart with one series per method; lines connect points of the
// same (method, d) in x order when connect is set.
std::string svg_chart(const ValidationReport& r, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, bool xlog, double (*x_of)(const ValidationRow&), bool connect) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  std::vector<double> xs, ys;
  for (const auto& row : r.rows)
    if (!row.failed) {
      xs.push_back(x_of(row));
      ys.push_back(row.mean_error);
    }
  const Axis ax = make_axis(xs, xlog), ay = make_axis(ys, true);
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"22\" font-size=\"14\">{}</text>\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n"
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n"
      "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>\n",
      W, H, L, title, L, T, W - L - R, H - T - B, (W - R + L) / 2, H - 12, xlabel, (H - B + T) / 2, (H - B + T) / 2,
      ylabel);
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", L, H - B + 16, num(ax.lo));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", W - R, H - B + 16, num(ax.hi));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", L - 4, H - B, num(ay.lo));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", L - 4, T + 10, num(ay.hi));

  std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> series;
  for (const auto& row : r.rows)
    if (!row.failed) series[{row.method, row.d}].emplace_back(x_of(row), row.mean_error);
  int legend = 0;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* c = colour(key.first);
    std::string poly;
    for (const auto& [x, y] : pts) {
      if (xlog && x <= 0.0) continue;
      const double px = ax.map(x, L, W - R), py = ay.map(y, H - B, T);
      s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", px, py, c);
      poly += fmt::format("{:.1f},{:.1f} ", px, py);
    }
    if (connect && pts.size() > 1)
      s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>\n", poly, c);
    s += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{} d={}</text>\n", W - R + 10, T + 14 * (legend + 1), c,
                     key.first, key.second);
    ++legend;
  }
  s += "</svg>\n";
  return s;
}

double x_points(const ValidationRow& r) { return r.m; }
double x_runtime(const ValidationRow& r) { return r.relative_runtime; }

}  // namespace

std::vector<std::size_t> pareto_front(const std::vector<ValidationRow>& rows) {
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].failed) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < rows.size() && !dominated; ++j)
      dominated = j != i && !rows[j].failed && dominates(rows[j], rows[i]);
    if (!dominated) front.push_back(i);
  }
  return front;
}

std::string errors_csv(const ValidationReport& r) {
  std::string s = "method;d;m;points;mean_error_percent;failed;divergences\n";
  for (const auto& row : r.rows)
    s += fmt::format("{};{};{};{};{};{};{}\n", row.method, row.d, row.m, row.points, num(row.mean_error),
                     row.failed ? 1 : 0, row.divergences);
  return s;
}

std::string runtimes_csv(const ValidationReport& r) {
  std::string s = "method;d;m;online_seconds;relative_runtime_percent;mean_error_percent;train_seconds\n";
  for (const auto& row : r.rows)
    s += fmt::format("{};{};{};{};{};{};{}\n", row.method, row.d, row.m, num(row.online_seconds),
                     num(row.relative_runtime), num(row.mean_error), num(row.train_seconds));
  return s;
}

std::string pareto_csv(const ValidationReport& r) {
  std::string s = "method;d;m;relative_runtime_percent;online_seconds;mean_error_percent\n";
  for (std::size_t i : pareto_front(r.rows)) {
    const auto& row = r.rows[i];
    s += fmt::format("{};{};{};{};{};{}\n", row.method, row.d, row.m, num(row.relative_runtime),
                     num(row.online_seconds), num(row.mean_error));
  }
  return s;
}

std::string summary_text(const ValidationReport& r) {
  std::string s = fmt::format("validation samples: {}\nFOM time on these samples: {} s\nseed: {}\nmesh hash: {}\nconfig hash: {}\n\n",
                              r.samples, num(r.fom_seconds), r.seed, r.mesh_hash, r.config_hash);
  s += fmt::format("{:<5} {:>3} {:>4} {:>12} {:>12} {:>12}\n", "", "d", "m", "error [%]", "online [s]", "rel. time [%]");
  for (const auto& row : r.rows)
    s += fmt::format("{:<5} {:>3} {:>4} {:>12} {:>12} {:>12}{}\n", row.method, row.d, row.m,
                     row.failed ? "x" : num(row.mean_error), num(row.online_seconds), num(row.relative_runtime),
                     row.failed ? "  (" + row.failure + ")" : "");
  for (const auto& skip : r.skipped) s += "skipped: " + skip + "\n";
  return s;
}

void write_report(const ValidationReport& r, const fs::path& out_dir, bool plot) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) raise(ErrorKind::IoError, fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
  write_file(out_dir / "errors.csv", errors_csv(r));
  write_file(out_dir / "runtimes.csv", runtimes_csv(r));
  write_file(out_dir / "pareto.csv", pareto_csv(r));
  write_file(out_dir / "summary.txt", summary_text(r));
  if (plot) {
    write_file(out_dir / "errors_vs_m.svg",
               svg_chart(r, "Mean error vs. integration points", "m", "mean error [%]", true, x_points, true));
    write_file(out_dir / "pareto.svg",
               svg_chart(r, "Mean error vs. relative runtime", "runtime relative to FOM [%]", "mean error [%]", true,
                         x_runtime, false));
  }
}

std::string report_to_json(const ValidationReport& r) {
  nlohmann::json j;
  j["seed"] = r.seed;
  j["mesh_hash"] = r.mesh_hash;
  j["config_hash"] = r.config_hash;
  j["samples"] = r.samples;
  j["fom_seconds"] = r.fom_seconds;
  j["skipped"] = r.skipped;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json o;
    o["method"] = row.method;
    o["d"] = row.d;
    o["m"] = row.m;
    o["points"] = row.points;
    o["mean_error"] = row.failed ? nlohmann::json(nullptr) : nlohmann::json(row.mean_error);
    o["failed"] = row.failed;
    o["divergences"] = row.divergences;
    o["failure"] = row.failure;
    o["online_seconds"] = row.online_seconds;
    o["relative_runtime"] = row.relative_runtime;
    o["train_seconds"] = row.train_seconds;
    o["sample_errors"] = row.sample_errors;
    j["rows"].push_back(o);
  }
  return j.dump(1);
}

ValidationReport report_from_json(const std::string& text) {
  ValidationReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.mesh_hash = j.at("mesh_hash").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::uint64_t>();
    r.samples = j.at("samples").get<int>();
    r.fom_seconds = j.at("fom_seconds").get<double>();
    r.skipped = j.at("skipped").get<std::vector<std::string>>();
    for (const auto& o : j.at("rows")) {
      ValidationRow row;
      row.method = o.at("method").get<std::string>();
      row.d = o.at("d").get<int>();
      row.m = o.at("m").get<int>();
      row.points = o.at("points").get<int>();
      if (!o.at("mean_error").is_null()) row.mean_error = o.at("mean_error").get<double>();
      row.failed = o.at("failed").get<bool>();
      row.divergences = o.at("divergences").get<int>();
      row.failure = o.at("failure").get<std::string>();
      row.online_seconds = o.at("online_seconds").get<double>();
      row.relative_runtime = o.at("relative_runtime").get<double>();
      row.train_seconds = o.at("train_seconds").get<double>();
      row.sample_errors = o.at("sample_errors").get<std::vector<double>>();
      r.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::FormatVersionMismatch, fmt::format("invalid report JSON: {}", e.what()));
  }
  return r;
}

}  // namespace strainrom
