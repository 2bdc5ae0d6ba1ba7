#include "mmest/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace mmest {

std::string to_string(const EstimatorSpec& spec) {
  switch (spec.kind) {
    case EstimatorSpec::Kind::imm:
      return "imm";
    case EstimatorSpec::Kind::amm:
      return "amm";
    case EstimatorSpec::Kind::kf:
      return "kf:" + std::to_string(spec.model_index);
  }
  return "?";
}

std::string column_token(const EstimatorSpec& spec) {
  if (spec.kind == EstimatorSpec::Kind::kf) {
    return "kf" + std::to_string(spec.model_index);
  }
  return to_string(spec);
}

EstimatorSpec parse_estimator(const std::string& text) {
  if (text == "imm") return EstimatorSpec{EstimatorSpec::Kind::imm, 0};
  if (text == "amm") return EstimatorSpec{EstimatorSpec::Kind::amm, 0};
  if (text.rfind("kf:", 0) == 0) {
    const std::string index = text.substr(3);
    if (!index.empty() &&
        std::all_of(index.begin(), index.end(),
                    [](unsigned char c) { return std::isdigit(c); })) {
      return EstimatorSpec{EstimatorSpec::Kind::kf, std::stoul(index)};
    }
  }
  throw ValidationError("estimators: unknown estimator '" + text +
                        "' (expected imm, amm or kf:<index>)");
}

void check_estimator_list(const std::vector<EstimatorSpec>& estimators,
                          std::size_t model_count) {
  if (estimators.empty()) {
    throw ValidationError("estimators: empty list");
  }
  for (std::size_t a = 0; a < estimators.size(); ++a) {
    const auto& spec = estimators[a];
    if (spec.kind == EstimatorSpec::Kind::kf &&
        spec.model_index >= model_count) {
      throw ValidationError("estimators: kf index " +
                            std::to_string(spec.model_index) +
                            " out of range for " +
                            std::to_string(model_count) + " models");
    }
    for (std::size_t b = 0; b < a; ++b) {
      const auto& other = estimators[b];
      if (other.kind == spec.kind &&
          (spec.kind != EstimatorSpec::Kind::kf ||
           other.model_index == spec.model_index)) {
        throw ValidationError("estimators: duplicate entry '" +
                              to_string(spec) + "'");
      }
    }
  }
}

void validate_scenario(const Scenario& scenario) {
  if (scenario.n_steps < 1) {
    throw ValidationError("n_steps: must be >= 1");
  }
  check_probability_vector(scenario.mu0, "mu0");
  const auto r = static_cast<Index>(scenario.set.size());
  if (scenario.mu0.size() != r) {
    throw ValidationError("mu0: size does not match model count");
  }
  check_finite(scenario.initial_truth, "initial_truth");
  if (scenario.initial_truth.size() != scenario.set.fused_dim) {
    throw ValidationError("initial_truth: dim does not match fused space");
  }
  if (scenario.initial_estimate.dim() != scenario.set.fused_dim) {
    throw ValidationError("initial_estimate: dim does not match fused space");
  }
  if (!scenario.schedule.markov) {
    if (scenario.schedule.fixed.size() !=
        static_cast<std::size_t>(scenario.n_steps)) {
      throw ValidationError("mode_schedule: fixed schedule length != n_steps");
    }
    for (int m : scenario.schedule.fixed) {
      if (m < 0 || m >= static_cast<int>(scenario.set.size())) {
        throw ValidationError("mode_schedule: model index out of range");
      }
    }
  }
}

namespace {

int sample_index(const Vector& weights, double u) {
  double cum = 0.0;
  for (Index i = 0; i < weights.size(); ++i) {
    cum += weights(i);
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

}  // namespace

std::vector<int> sample_mode_sequence(const Matrix& transition,
                                      const Vector& mu0, int n,
                                      SplitMix64& rng) {
  check_probability_vector(mu0, "mu0");
  if (transition.rows() != mu0.size() || transition.cols() != mu0.size()) {
    throw DimensionMismatch("sample_mode_sequence: transition must be r x r");
  }
  std::vector<int> modes(static_cast<std::size_t>(n));
  if (n <= 0) return modes;
  modes[0] = sample_index(mu0, rng.next_uniform());
  for (int k = 1; k < n; ++k) {
    modes[static_cast<std::size_t>(k)] = sample_index(
        transition.row(modes[static_cast<std::size_t>(k - 1)]).transpose(),
        rng.next_uniform());
  }
  return modes;
}

std::pair<std::vector<Vector>, std::vector<Vector>> simulate_trajectory(
    const ModelSet& set, const std::vector<int>& modes, const Vector& x0,
    GaussianStream& process_noise, GaussianStream& measurement_noise) {
  if (x0.size() != set.fused_dim) {
    throw DimensionMismatch("simulate_trajectory: x0 dim != fused dim");
  }
  check_finite(x0, "x0");
  for (int m : modes) {
    if (m < 0 || m >= static_cast<int>(set.size())) {
      throw DimensionMismatch("simulate_trajectory: mode index out of range");
    }
  }
  // Measurement noise is drawn as chol(R) * z.
  std::vector<Matrix> meas_factors;
  meas_factors.reserve(set.size());
  for (const auto& model : set.models) {
    meas_factors.push_back(Eigen::LLT<Matrix>(model.R).matrixL());
  }

  const std::size_t n = modes.size();
  std::vector<Vector> truth(n);
  std::vector<Vector> measurements(n);
  if (n == 0) return {truth, measurements};

  auto measure = [&](int mode, const Vector& model_state) {
    const auto& model = set.models[static_cast<std::size_t>(mode)];
    Vector e(model.measurement_dim());
    for (Index i = 0; i < e.size(); ++i) e(i) = measurement_noise.next();
    return Vector(model.H * model_state +
                  meas_factors[static_cast<std::size_t>(mode)] * e);
  };

  truth[0] = x0;
  measurements[0] =
      measure(modes[0], set.lifts[static_cast<std::size_t>(modes[0])]
                            .transpose() *
                        x0);
  for (std::size_t k = 1; k < n; ++k) {
    const int mode = modes[k];
    const auto& model = set.models[static_cast<std::size_t>(mode)];
    const Matrix& lift = set.lifts[static_cast<std::size_t>(mode)];
    Vector w(model.noise_dim());
    const double sigma = std::sqrt(model.process_noise_variance);
    for (Index i = 0; i < w.size(); ++i) w(i) = sigma * process_noise.next();
    const Vector propagated =
        model.A * (lift.transpose() * truth[k - 1]) + model.B * w;
    truth[k] = lift * propagated;
    measurements[k] = measure(mode, propagated);
  }
  return {truth, measurements};
}

namespace {

FusedEstimate kf_row(const ModelSet& set, std::size_t model_index,
                     const GaussianState& native, double log_l) {
  Vector mu = Vector::Zero(static_cast<Index>(set.size()));
  mu(static_cast<Index>(model_index)) = 1.0;
  Vector log_l_vec = Vector::Zero(static_cast<Index>(set.size()));
  log_l_vec(static_cast<Index>(model_index)) = log_l;
  return FusedEstimate{lift_to_fused(set, model_index, native), std::move(mu),
                       std::move(log_l_vec)};
}

}  // namespace

RunTrace simulate_run(const Scenario& scenario,
                      const std::vector<EstimatorSpec>& estimators,
                      std::uint64_t run_seed) {
  validate_scenario(scenario);
  const auto& set = scenario.set;
  check_estimator_list(estimators, set.size());

  SplitMix64 mode_rng(child_seed(run_seed, 0));
  GaussianStream process_noise(child_seed(run_seed, 1));
  GaussianStream measurement_noise(child_seed(run_seed, 2));

  RunTrace trace;
  trace.modes = scenario.schedule.markov
                    ? sample_mode_sequence(set.transition, scenario.mu0,
                                           scenario.n_steps, mode_rng)
                    : scenario.schedule.fixed;
  std::tie(trace.truth, trace.measurements) = simulate_trajectory(
      set, trace.modes, scenario.initial_truth, process_noise,
      measurement_noise);

  // Per-estimator recursion state.
  std::vector<BankState> banks(estimators.size());
  std::vector<GaussianState> natives;  // parallel to estimators; kf only
  natives.reserve(estimators.size());
  trace.estimates.reserve(estimators.size());
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    const auto& spec = estimators[e];
    EstimatorTrace et;
    et.spec = spec;
    et.estimates.reserve(static_cast<std::size_t>(scenario.n_steps));
    if (spec.kind == EstimatorSpec::Kind::kf) {
      natives.push_back(
          project_to_model(set, spec.model_index, scenario.initial_estimate));
      et.estimates.push_back(kf_row(set, spec.model_index, natives.back(), 0.0));
    } else {
      natives.push_back(scenario.initial_estimate);  // placeholder, unused
      banks[e] = amm_init(set, scenario.initial_estimate, scenario.mu0);
      et.estimates.push_back(fuse(set, banks[e]));
    }
    trace.estimates.push_back(std::move(et));
  }

  for (int k = 1; k < scenario.n_steps; ++k) {
    const Vector& y = trace.measurements[static_cast<std::size_t>(k)];
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      const auto& spec = estimators[e];
      switch (spec.kind) {
        case EstimatorSpec::Kind::imm: {
          ImmStepResult res = imm_step(set, banks[e], y);
          banks[e] = std::move(res.bank);
          trace.estimates[e].estimates.push_back(std::move(res.fused));
          break;
        }
        case EstimatorSpec::Kind::amm: {
          AmmStepResult res = amm_step(set, banks[e], y);
          banks[e] = std::move(res.bank);
          trace.estimates[e].estimates.push_back(std::move(res.fused));
          break;
        }
        case EstimatorSpec::Kind::kf: {
          const auto& model = set.models[spec.model_index];
          const GaussianState predicted = predict(model, natives[e]);
          const Innovation inn = innovate(model, predicted, y);
          natives[e] = update(model, predicted, y);
          trace.estimates[e].estimates.push_back(
              kf_row(set, spec.model_index, natives[e], log_likelihood(inn)));
          break;
        }
      }
    }
  }
  return trace;
}

namespace {

struct NeesAccumulator {
  std::vector<double> sum;  // per step
  long long regularized = 0;

  void add(const GaussianState& estimate, const Vector& truth,
           std::size_t step) {
    const NeesResult r = nees(estimate, truth);
    sum[step] += r.value;
    if (r.regularized) ++regularized;
  }
};

GaussianState pv_marginal(const GaussianState& fused) {
  return GaussianState(fused.mean.head(2), Matrix(fused.cov.topLeftCorner(2, 2)),
                       fused.time_index, fused.tag);
}

}  // namespace

MonteCarloReport run_monte_carlo(const Scenario& scenario,
                                 const std::vector<EstimatorSpec>& estimators,
                                 int runs, std::uint64_t master_seed,
                                 double confidence_level) {
  validate_scenario(scenario);
  if (runs < 1) {
    throw InvalidParameter("run_monte_carlo: runs must be >= 1");
  }
  if (estimators.empty()) {
    throw InvalidParameter("run_monte_carlo: no estimators requested");
  }
  const auto n_steps = static_cast<std::size_t>(scenario.n_steps);
  const auto n_est = estimators.size();
  const auto fused_dim = static_cast<std::size_t>(scenario.set.fused_dim);
  const auto r = scenario.set.size();
  const bool emit_pv = scenario.set.fused_dim > 2;

  // errors[e][component][run][step]
  std::vector<std::vector<std::vector<std::vector<double>>>> errors(
      n_est, std::vector<std::vector<std::vector<double>>>(fused_dim));
  std::vector<NeesAccumulator> nees_primary(n_est);
  std::vector<NeesAccumulator> nees_pv(n_est);
  std::vector<std::vector<std::vector<double>>> mu_sum(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    nees_primary[e].sum.assign(n_steps, 0.0);
    nees_pv[e].sum.assign(n_steps, 0.0);
    if (estimators[e].kind != EstimatorSpec::Kind::kf) {
      mu_sum[e].assign(r, std::vector<double>(n_steps, 0.0));
    }
  }

  int completed = 0;
  int failures = 0;
  for (int j = 0; j < runs; ++j) {
    RunTrace trace;
    try {
      trace = simulate_run(scenario, estimators,
                           child_seed(master_seed, static_cast<std::uint64_t>(j)));
    } catch (const Error&) {
      ++failures;
      continue;
    }
    for (std::size_t e = 0; e < n_est; ++e) {
      const auto& spec = estimators[e];
      const auto& est = trace.estimates[e].estimates;
      for (std::size_t c = 0; c < fused_dim; ++c) {
        errors[e][c].emplace_back(n_steps);
      }
      for (std::size_t k = 0; k < n_steps; ++k) {
        const Vector& truth = trace.truth[k];
        const GaussianState& fused_state = est[k].state;
        for (std::size_t c = 0; c < fused_dim; ++c) {
          errors[e][c].back()[k] =
              fused_state.mean(static_cast<Index>(c)) -
              truth(static_cast<Index>(c));
        }
        if (spec.kind == EstimatorSpec::Kind::kf) {
          const GaussianState native =
              project_to_model(scenario.set, spec.model_index, fused_state);
          const Vector native_truth =
              scenario.set.lifts[spec.model_index].transpose() * truth;
          nees_primary[e].add(native, native_truth, k);
        } else {
          nees_primary[e].add(fused_state, truth, k);
          if (emit_pv) {
            nees_pv[e].add(pv_marginal(fused_state), truth.head(2), k);
          }
          for (std::size_t m = 0; m < r; ++m) {
            mu_sum[e][m][k] += est[k].mu(static_cast<Index>(m));
          }
        }
      }
    }
    ++completed;
  }

  MonteCarloReport report;
  report.n_steps = scenario.n_steps;
  report.runs_requested = runs;
  report.runs_completed = completed;
  report.failures = failures;
  report.master_seed = master_seed;
  report.confidence_level = confidence_level;

  const double n_completed = std::max(completed, 1);
  std::map<int, NeesInterval> intervals;
  for (std::size_t e = 0; e < n_est; ++e) {
    const auto& spec = estimators[e];
    EstimatorReport er;
    er.spec = spec;
    er.rmse.reserve(fused_dim);
    for (std::size_t c = 0; c < fused_dim; ++c) {
      er.rmse.push_back(completed > 0 ? rmse(errors[e][c])
                                      : std::vector<double>(n_steps, 0.0));
    }
    er.nees_dim = spec.kind == EstimatorSpec::Kind::kf
                      ? static_cast<int>(
                            scenario.set.models[spec.model_index].state_dim())
                      : static_cast<int>(scenario.set.fused_dim);
    er.mean_nees.assign(n_steps, 0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
      er.mean_nees[k] = nees_primary[e].sum[k] / n_completed;
    }
    if (spec.kind != EstimatorSpec::Kind::kf && emit_pv) {
      er.mean_nees_pv.assign(n_steps, 0.0);
      for (std::size_t k = 0; k < n_steps; ++k) {
        er.mean_nees_pv[k] = nees_pv[e].sum[k] / n_completed;
      }
    }
    if (spec.kind != EstimatorSpec::Kind::kf) {
      er.mean_mu.assign(r, std::vector<double>(n_steps, 0.0));
      for (std::size_t m = 0; m < r; ++m) {
        for (std::size_t k = 0; k < n_steps; ++k) {
          er.mean_mu[m][k] = mu_sum[e][m][k] / n_completed;
        }
      }
    }
    report.nees_regularized_count +=
        nees_primary[e].regularized + nees_pv[e].regularized;

    if (completed > 0) {
      if (intervals.find(er.nees_dim) == intervals.end()) {
        intervals.emplace(er.nees_dim,
                          nees_interval(er.nees_dim, completed,
                                        confidence_level));
      }
      if (!er.mean_nees_pv.empty() && intervals.find(2) == intervals.end()) {
        intervals.emplace(2, nees_interval(2, completed, confidence_level));
      }
    }
    report.estimators.push_back(std::move(er));
  }
  for (auto& [dim, interval] : intervals) {
    report.intervals.push_back(interval);
  }
  return report;
}

}  // namespace mmest
