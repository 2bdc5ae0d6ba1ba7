#pragma once

#include <vector>

#include "mmest/kalman.hpp"

namespace mmest {

/// Full recursion state of a multiple-model bank: one Gaussian per model
/// (each in its model's native space) plus the mode-probability vector.
struct BankState {
  std::vector<GaussianState> per_model;
  Vector mu;
  int time_index = 0;
};

/// Moment-matched combination of the bank in the fused space, plus the
/// diagnostics produced by the step that formed it.
struct FusedEstimate {
  GaussianState state;
  Vector mu;
  Vector per_model_log_likelihood;
};

struct AmmStepResult {
  BankState bank;
  FusedEstimate fused;
};

/// Starts a bank from a fused-space prior: model i receives the projection
/// (T_i^T x, T_i^T C T_i).
BankState amm_init(const ModelSet& set, const GaussianState& initial,
                   const Vector& mu0);

/// Bayes recursion mu_i' = mu_i * L_i / sum_j mu_j * L_j, evaluated with
/// max-log shifting. Probabilities below tol::probability_floor are pinned
/// to the floor and the remaining mass renormalized. Throws
/// DegenerateLikelihoods when every weighted likelihood vanishes.
Vector update_mode_probabilities(const Vector& mu_prev, const Vector& log_likelihoods);

/// Lifts each per-model estimate to the fused space and moment-matches:
///   x = sum_i mu_i x_i,  C = sum_i mu_i (C_i + (x_i - x)(x_i - x)^T).
/// `per_model_log_likelihood` is carried into the result for diagnostics
/// (zeros when omitted).
FusedEstimate fuse(const ModelSet& set, const BankState& bank,
                   const Vector& per_model_log_likelihood = Vector());

/// One AMM cycle: per-model predict/innovate/update, likelihood-weighted
/// mode-probability recursion, fusion. The true model is assumed fixed, so
/// there is no interaction between filters.
AmmStepResult amm_step(const ModelSet& set, const BankState& bank,
                       const Vector& y);

}  // namespace mmest
