#include "mmest/amm.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace mmest {

BankState amm_init(const ModelSet& set, const GaussianState& initial,
                   const Vector& mu0) {
  check_probability_vector(mu0, "mu0");
  if (static_cast<std::size_t>(mu0.size()) != set.size()) {
    throw DimensionMismatch("amm_init: mu0 size != model count");
  }
  if (initial.dim() != set.fused_dim) {
    throw DimensionMismatch("amm_init: initial state dim != fused dim");
  }
  BankState bank;
  bank.per_model.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    bank.per_model.push_back(project_to_model(set, i, initial));
  }
  bank.mu = mu0;
  bank.time_index = initial.time_index;
  return bank;
}

Vector update_mode_probabilities(const Vector& mu_prev,
                                 const Vector& log_likelihoods) {
  check_probability_vector(mu_prev, "mu_prev");
  if (log_likelihoods.size() != mu_prev.size()) {
    throw DimensionMismatch(
        "update_mode_probabilities: likelihood count != mu size");
  }
  const Index r = mu_prev.size();
  Vector shifted(r);
  double max_log = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < r; ++i) {
    shifted(i) = std::log(mu_prev(i)) + log_likelihoods(i);
    if (shifted(i) > max_log) max_log = shifted(i);
  }
  if (!std::isfinite(max_log)) {
    throw DegenerateLikelihoods(
        "update_mode_probabilities: all weighted likelihoods are zero");
  }
  Vector mu(r);
  for (Index i = 0; i < r; ++i) {
    mu(i) = std::exp(shifted(i) - max_log);
  }
  mu /= mu.sum();

  // Pin entries at the floor and renormalize the free mass so the floor
  // holds exactly and the vector still sums to one.
  const double floor = tol::probability_floor;
  double pinned_mass = 0.0;
  double free_mass = 0.0;
  for (Index i = 0; i < r; ++i) {
    if (mu(i) < floor) {
      pinned_mass += floor;
    } else {
      free_mass += mu(i);
    }
  }
  if (pinned_mass > 0.0) {
    const double scale = (1.0 - pinned_mass) / free_mass;
    for (Index i = 0; i < r; ++i) {
      mu(i) = mu(i) < floor ? floor : mu(i) * scale;
    }
  }
  return mu;
}

FusedEstimate fuse(const ModelSet& set, const BankState& bank,
                   const Vector& per_model_log_likelihood) {
  const auto r = set.size();
  if (bank.per_model.size() != r ||
      static_cast<std::size_t>(bank.mu.size()) != r) {
    throw DimensionMismatch("fuse: bank does not match model set");
  }
  Vector log_l = per_model_log_likelihood.size() == 0
                     ? Vector::Zero(static_cast<Index>(r))
                     : per_model_log_likelihood;
  if (static_cast<std::size_t>(log_l.size()) != r) {
    throw DimensionMismatch("fuse: likelihood count != model count");
  }

  std::vector<GaussianState> lifted;
  lifted.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    lifted.push_back(lift_to_fused(set, i, bank.per_model[i]));
  }
  Vector mean = Vector::Zero(set.fused_dim);
  for (std::size_t i = 0; i < r; ++i) {
    mean += bank.mu(static_cast<Index>(i)) * lifted[i].mean;
  }
  Matrix cov = Matrix::Zero(set.fused_dim, set.fused_dim);
  for (std::size_t i = 0; i < r; ++i) {
    const Vector spread = lifted[i].mean - mean;
    cov += bank.mu(static_cast<Index>(i)) *
           (lifted[i].cov + spread * spread.transpose());
  }
  GaussianState state(std::move(mean), symmetrize(cov), bank.time_index,
                      StateTag::filtered);
  return FusedEstimate{std::move(state), bank.mu, std::move(log_l)};
}

AmmStepResult amm_step(const ModelSet& set, const BankState& bank,
                       const Vector& y) {
  const auto r = set.size();
  if (bank.per_model.size() != r) {
    throw DimensionMismatch("amm_step: bank does not match model set");
  }
  std::vector<GaussianState> posterior;
  posterior.reserve(r);
  Vector log_l(static_cast<Index>(r));
  for (std::size_t i = 0; i < r; ++i) {
    const auto& model = set.models[i];
    const GaussianState predicted = predict(model, bank.per_model[i]);
    const Innovation inn = innovate(model, predicted, y);
    log_l(static_cast<Index>(i)) = log_likelihood(inn);
    posterior.push_back(update(model, predicted, y));
  }
  BankState next;
  next.mu = update_mode_probabilities(bank.mu, log_l);
  next.per_model = std::move(posterior);
  next.time_index = bank.time_index + 1;
  FusedEstimate fused = fuse(set, next, log_l);
  return AmmStepResult{std::move(next), std::move(fused)};
}

}  // namespace mmest
