#include "mmest/report.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>

namespace mmest {

std::string format_value(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

namespace {

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' endings on all platforms
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  return out;
}

void write_mode_probability(const MonteCarloReport& report,
                            const LoadedScenario& loaded,
                            const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "step";
  for (const auto& er : report.estimators) {
    if (er.mean_mu.empty()) continue;
    for (std::size_t m = 0; m < er.mean_mu.size(); ++m) {
      out << ',' << column_token(er.spec) << "_mu_"
          << sanitize(loaded.scenario.set.models[m].name);
    }
  }
  out << '\n';
  for (int k = 0; k < report.n_steps; ++k) {
    out << k;
    for (const auto& er : report.estimators) {
      if (er.mean_mu.empty()) continue;
      for (const auto& series : er.mean_mu) {
        out << ',' << format_value(series[static_cast<std::size_t>(k)]);
      }
    }
    out << '\n';
  }
}

void write_rmse(const MonteCarloReport& report,
                const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "step";
  for (const auto& er : report.estimators) {
    out << ",rmse_" << column_token(er.spec);
  }
  out << '\n';
  for (int k = 0; k < report.n_steps; ++k) {
    out << k;
    for (const auto& er : report.estimators) {
      // Position is fused component 0.
      out << ',' << format_value(er.rmse[0][static_cast<std::size_t>(k)]);
    }
    out << '\n';
  }
}

void write_nees(const MonteCarloReport& report,
                const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "step";
  for (const auto& er : report.estimators) {
    out << ",nees_" << column_token(er.spec);
    if (!er.mean_nees_pv.empty()) {
      out << ",nees_" << column_token(er.spec) << "_pv";
    }
  }
  for (const auto& interval : report.intervals) {
    out << ",ci_lower_dim" << interval.dim << ",ci_upper_dim" << interval.dim;
  }
  out << '\n';
  for (int k = 0; k < report.n_steps; ++k) {
    const auto step = static_cast<std::size_t>(k);
    out << k;
    for (const auto& er : report.estimators) {
      out << ',' << format_value(er.mean_nees[step]);
      if (!er.mean_nees_pv.empty()) {
        out << ',' << format_value(er.mean_nees_pv[step]);
      }
    }
    for (const auto& interval : report.intervals) {
      out << ',' << format_value(interval.lower) << ','
          << format_value(interval.upper);
    }
    out << '\n';
  }
}

void write_summary(const MonteCarloReport& report,
                   const LoadedScenario& loaded,
                   const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "runs_requested=" << report.runs_requested << '\n';
  out << "runs_completed=" << report.runs_completed << '\n';
  out << "failures=" << report.failures << '\n';
  out << "seed=" << report.master_seed << '\n';
  out << "n_steps=" << report.n_steps << '\n';
  out << "confidence_level=" << format_value(report.confidence_level) << '\n';
  out << "nees_regularized_count=" << report.nees_regularized_count << '\n';
  for (const auto& interval : report.intervals) {
    out << "nees_interval_dim" << interval.dim << "=["
        << format_value(interval.lower) << ", "
        << format_value(interval.upper) << "]\n";
  }
  out << "config=" << '\n' << describe_scenario(loaded) << '\n';
}

}  // namespace

ReportPaths write_report(const MonteCarloReport& report,
                         const LoadedScenario& loaded,
                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ReportPaths paths{out_dir / "mode_probability.csv", out_dir / "rmse.csv",
                    out_dir / "nees.csv", out_dir / "summary.txt"};
  write_mode_probability(report, loaded, paths.mode_probability);
  write_rmse(report, paths.rmse);
  write_nees(report, paths.nees);
  write_summary(report, loaded, paths.summary);
  return paths;
}

}  // namespace mmest
