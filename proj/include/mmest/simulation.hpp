#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mmest/imm.hpp"
#include "mmest/metrics.hpp"
#include "mmest/random.hpp"

namespace mmest {

/// One estimator requested from the harness: the IMM bank, the AMM bank,
/// or a single-model Kalman filter ("kf:<index>").
struct EstimatorSpec {
  enum class Kind { imm, amm, kf };
  Kind kind = Kind::imm;
  std::size_t model_index = 0;
};

std::string to_string(const EstimatorSpec& spec);
/// CSV-friendly token: "imm", "amm", "kf0", ...
std::string column_token(const EstimatorSpec& spec);
/// Parses "imm", "amm" or "kf:<index>"; throws ValidationError otherwise.
EstimatorSpec parse_estimator(const std::string& text);
/// Rejects duplicates and kf indices >= model_count.
void check_estimator_list(const std::vector<EstimatorSpec>& estimators,
                          std::size_t model_count);

/// Mode sequence policy: a fixed per-step schedule shared by all runs, or
/// fresh Markov sampling per run.
struct ModeSchedule {
  bool markov = true;
  std::vector<int> fixed;  // length n_steps when markov == false
};

struct Scenario {
  ModelSet set;
  int n_steps = 0;
  Vector mu0;
  Vector initial_truth;            // fused space
  GaussianState initial_estimate;  // fused space
  ModeSchedule schedule;
};

/// Throws unless the scenario is internally consistent.
void validate_scenario(const Scenario& scenario);

/// Everything recorded about a single run. All lists have n_steps entries;
/// index 0 holds the initial condition. measurements[0] observes the
/// initial truth but is not consumed by the estimators, which process
/// measurements 1..n_steps-1 as full predict/update cycles.
struct EstimatorTrace {
  EstimatorSpec spec;
  std::vector<FusedEstimate> estimates;
};

struct RunTrace {
  std::vector<Vector> truth;
  std::vector<int> modes;
  std::vector<Vector> measurements;
  std::vector<EstimatorTrace> estimates;
};

/// mode_0 ~ mu0, mode_k ~ transition row of mode_{k-1}; inverse-CDF
/// sampling with cumulative sums in index order.
std::vector<int> sample_mode_sequence(const Matrix& transition,
                                      const Vector& mu0, int n,
                                      SplitMix64& rng);

/// Ground truth in the fused space plus measurements, driven by the given
/// mode sequence. Per step with active model i the fused truth is
/// projected to model space, propagated as x+ = A x + B w with
/// w ~ N(0, sigma_i^2 I), and lifted back (components the model does not
/// carry become zero). Measurements are y = H x + e, e ~ N(0, R).
std::pair<std::vector<Vector>, std::vector<Vector>> simulate_trajectory(
    const ModelSet& set, const std::vector<int>& modes, const Vector& x0,
    GaussianStream& process_noise, GaussianStream& measurement_noise);

/// One full run: trajectory plus every requested estimator's trace.
/// Substreams are derived from run_seed via child_seed(run_seed, tag) with
/// tags 0 (modes), 1 (process noise), 2 (measurement noise).
RunTrace simulate_run(const Scenario& scenario,
                      const std::vector<EstimatorSpec>& estimators,
                      std::uint64_t run_seed);

struct EstimatorReport {
  EstimatorSpec spec;
  /// [component][step], components in fused order (position, velocity, ...).
  std::vector<std::vector<double>> rmse;
  /// Mean NEES per step in the estimator's primary space: the native model
  /// space for single-model filters, the fused space for IMM/AMM.
  std::vector<double> mean_nees;
  int nees_dim = 0;
  /// Position-velocity marginal NEES for fused estimators (empty when the
  /// fused space is not larger than 2).
  std::vector<double> mean_nees_pv;
  /// [model][step] mean mode probabilities; empty for single-model filters.
  std::vector<std::vector<double>> mean_mu;
};

struct MonteCarloReport {
  int n_steps = 0;
  int runs_requested = 0;
  int runs_completed = 0;
  int failures = 0;
  std::uint64_t master_seed = 0;
  double confidence_level = 0.0;
  std::vector<EstimatorReport> estimators;
  /// One interval per distinct NEES dimension in the report, ascending.
  std::vector<NeesInterval> intervals;
  long long nees_regularized_count = 0;
};

/// Monte Carlo batch. Run j uses child_seed(master_seed, j); every
/// estimator consumes identical measurements within a run. A run that
/// throws is counted in `failures` and excluded from the aggregates.
/// Fully deterministic in (scenario, estimators, runs, master_seed).
MonteCarloReport run_monte_carlo(const Scenario& scenario,
                                 const std::vector<EstimatorSpec>& estimators,
                                 int runs, std::uint64_t master_seed,
                                 double confidence_level = 0.95);

}  // namespace mmest
