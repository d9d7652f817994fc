// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "strainrom/validation.hpp"

namespace strainrom {

/// Indices of non-failed rows not dominated in (mean error, online time).
/// A row dominates another if it is no worse in both and better in one.
std::vector<std::size_t> pareto_front(const std::vector<ValidationRow>& rows);

/// Semicolon-separated tables, 6 significant digits, LF line endings.
std::string errors_csv(const ValidationReport& report);
std::string runtimes_csv(const ValidationReport& report);
std::string pareto_csv(const ValidationReport& report);
std::string summary_text(const ValidationReport& report);

/// Writes errors.csv, runtimes.csv, pareto.csv and summary.txt; with plot
/// also errors_vs_m.svg and pareto.svg. Throws IoError.
void write_report(const ValidationReport& report, const std::filesystem::path& out_dir, bool plot = false);

std::string report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const std::string& text);

}  // namespace strainrom
