#include "mmest/imm.hpp"

#include <cmath>
#include <utility>

namespace mmest {

Vector predict_mode_probabilities(const Matrix& transition, const Vector& mu) {
  check_probability_vector(mu, "mu");
  if (transition.rows() != mu.size() || transition.cols() != mu.size()) {
    throw DimensionMismatch(
        "predict_mode_probabilities: transition must be r x r");
  }
  return transition.transpose() * mu;
}

MixingWeights mixing_weights(const Matrix& transition, const Vector& mu) {
  Vector mu_pred = predict_mode_probabilities(transition, mu);
  const Index r = mu.size();
  Matrix w(r, r);
  for (Index i = 0; i < r; ++i) {
    if (mu_pred(i) < tol::probability_floor) {
      // Guard the division: fall back to the prior switch distribution.
      const double col_sum = transition.col(i).sum();
      if (col_sum > 0.0) {
        w.col(i) = transition.col(i) / col_sum;
      } else {
        w.col(i).setConstant(1.0 / static_cast<double>(r));
      }
    } else {
      w.col(i) = transition.col(i).cwiseProduct(mu) / mu_pred(i);
    }
  }
  return MixingWeights{std::move(w), std::move(mu_pred)};
}

std::vector<GaussianState> mix_estimates(const ModelSet& set,
                                         const BankState& bank,
                                         const MixingWeights& weights) {
  const auto r = set.size();
  if (bank.per_model.size() != r ||
      weights.w.rows() != static_cast<Index>(r) ||
      weights.w.cols() != static_cast<Index>(r)) {
    throw DimensionMismatch("mix_estimates: bank/weights do not match set");
  }
  std::vector<GaussianState> lifted;
  lifted.reserve(r);
  for (std::size_t j = 0; j < r; ++j) {
    lifted.push_back(lift_to_fused(set, j, bank.per_model[j]));
  }
  std::vector<GaussianState> mixed;
  mixed.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    Vector mean = Vector::Zero(set.fused_dim);
    for (std::size_t j = 0; j < r; ++j) {
      mean += weights.w(static_cast<Index>(j), static_cast<Index>(i)) *
              lifted[j].mean;
    }
    Matrix cov = Matrix::Zero(set.fused_dim, set.fused_dim);
    for (std::size_t j = 0; j < r; ++j) {
      const Vector spread = mean - lifted[j].mean;
      cov += weights.w(static_cast<Index>(j), static_cast<Index>(i)) *
             (lifted[j].cov + spread * spread.transpose());
    }
    GaussianState fused_mixed(std::move(mean), symmetrize(cov),
                              bank.time_index, StateTag::filtered);
    mixed.push_back(project_to_model(set, i, fused_mixed));
  }
  return mixed;
}

ImmStepResult imm_step(const ModelSet& set, const BankState& bank,
                       const Vector& y) {
  const auto r = set.size();
  if (bank.per_model.size() != r) {
    throw DimensionMismatch("imm_step: bank does not match model set");
  }
  const MixingWeights weights = mixing_weights(set.transition, bank.mu);
  const std::vector<GaussianState> mixed = mix_estimates(set, bank, weights);

  std::vector<GaussianState> posterior;
  posterior.reserve(r);
  Vector log_l(static_cast<Index>(r));
  for (std::size_t i = 0; i < r; ++i) {
    const auto& model = set.models[i];
    const GaussianState predicted = predict(model, mixed[i]);
    const Innovation inn = innovate(model, predicted, y);
    log_l(static_cast<Index>(i)) = log_likelihood(inn);
    posterior.push_back(update(model, predicted, y));
  }
  BankState next;
  next.mu = update_mode_probabilities(weights.mu_pred, log_l);
  next.per_model = std::move(posterior);
  next.time_index = bank.time_index + 1;
  FusedEstimate fused = fuse(set, next, log_l);
  return ImmStepResult{std::move(next), std::move(fused), weights.mu_pred};
}

}  // namespace mmest
