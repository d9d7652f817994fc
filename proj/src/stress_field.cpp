// SPDX-License-Identifier: Apache-2.0
#include "strainrom/stress_field.hpp"

#include <algorithm>
#include <cmath>

#include "strainrom/error.hpp"

namespace strainrom {

Tensor2 cauchy_stress(const VoigtVec9& P, const VoigtVec9& F) {
  const Tensor2 Ft = voigt_decode(F);
  const double J = Ft.determinant();
  if (!(J > 0.0)) raise(ErrorKind::NonPositiveJacobian, "cannot convert stress at an inverted point");
  return voigt_decode(P) * Ft.transpose() / J;
}

double von_mises(const Tensor2& sigma) {
  const Tensor2 sym = 0.5 * (sigma + sigma.transpose());
  const Tensor2 dev = sym - sym.trace() / 3.0 * Tensor2::Identity();
  return std::sqrt(1.5 * dev.squaredNorm());
}

std::vector<double> von_mises_field(const Material& mat, const std::vector<VoigtVec9>& F) {
  std::vector<double> out(F.size());
  for (std::size_t g = 0; g < F.size(); ++g) out[g] = von_mises(cauchy_stress(pk1_stress(mat, F[g]), F[g]));
  return out;
}

std::vector<double> local_stress_field(const ModeBasis& basis, const Material& mat, const VoigtVec9& Fbar,
                                       const Eigen::VectorXd& y) {
  return von_mises_field(mat, reconstruct_field(basis, y, Fbar));
}

StressFieldComparison compare_stress_fields(const std::vector<double>& rom, const std::vector<double>& fom) {
  if (rom.size() != fom.size()) raise(ErrorKind::DimensionMismatch, "stress fields differ in size");
  StressFieldComparison c;
  c.rom = rom;
  c.fom = fom;
  c.abs_error.resize(rom.size());
  for (std::size_t g = 0; g < rom.size(); ++g) c.abs_error[g] = std::abs(rom[g] - fom[g]);
  if (fom.empty()) return c;

  std::vector<double> sorted = fom;
  std::sort(sorted.begin(), sorted.end());
  c.max_fom = sorted.back();
  const double cutoff = sorted[static_cast<std::size_t>(0.9 * static_cast<double>(sorted.size() - 1))];
  for (std::size_t g = 0; g < fom.size(); ++g)
    if (fom[g] >= cutoff && fom[g] > 0.0) c.max_error_hotspots = std::max(c.max_error_hotspots, c.abs_error[g] / fom[g]);
  return c;
}

}  // namespace strainrom
