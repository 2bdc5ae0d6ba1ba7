#pragma once

#include <filesystem>

#include "mmest/scenario_io.hpp"

namespace mmest {

struct ReportPaths {
  std::filesystem::path mode_probability;
  std::filesystem::path rmse;
  std::filesystem::path nees;
  std::filesystem::path summary;
};

/// Formats a double with 17 significant digits ("%.17g"), enough to
/// round-trip exactly.
std::string format_value(double v);

/// Writes mode_probability.csv, rmse.csv, nees.csv and summary.txt into
/// out_dir (created if missing). CSV dialect: header row, '.' decimal
/// point, '\n' row terminator, no locale formatting.
ReportPaths write_report(const MonteCarloReport& report,
                         const LoadedScenario& loaded,
                         const std::filesystem::path& out_dir);

}  // namespace mmest
