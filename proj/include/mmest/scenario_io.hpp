#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mmest/simulation.hpp"

namespace mmest {

/// A scenario plus the batch settings that travel with it in the file.
struct LoadedScenario {
  Scenario scenario;
  int runs = 0;
  std::uint64_t seed = 0;
  std::vector<EstimatorSpec> estimators;
};

/// The builtin reconstruction of the maneuvering-target experiment:
/// CV and CA models (T = 1, sigma_w2 = 1, sigma_e2 = 1), transition
/// [[0.75, 0.25], [0.25, 0.75]], uniform mu0, 200 steps with the fixed
/// schedule CV/CA/CV/CA switching every 50 steps, zero initial truth,
/// initial estimate N(0, I), 1000 runs, seed 1, all estimators.
LoadedScenario paper_default_scenario();

/// Loads a JSON scenario file. Missing fields fall back to the builtin
/// defaults above. Throws ParseError on malformed JSON and
/// ValidationError (naming the field) on semantic problems.
LoadedScenario load_scenario(const std::filesystem::path& path);

/// Same, from an already-read document (used by load_scenario and tests).
LoadedScenario parse_scenario(const std::string& text);

/// Resolved configuration echo for the summary file.
std::string describe_scenario(const LoadedScenario& loaded);

}  // namespace mmest
