#pragma once

#include "mmest/amm.hpp"

namespace mmest {

/// Mixing weights w(j, i) = mu^(j|i), the probability model j was active
/// at k-1 given model i is active at k; columns are conditional
/// distributions and sum to one. mu_pred holds the predicted mode
/// probabilities mu^(i)_{k|k-1}.
struct MixingWeights {
  Matrix w;
  Vector mu_pred;
};

struct ImmStepResult {
  BankState bank;
  FusedEstimate fused;
  /// Predicted mode probabilities used by this cycle (diagnostic).
  Vector mu_pred;
};

/// mu_pred(i) = sum_j p(j, i) mu(j).
Vector predict_mode_probabilities(const Matrix& transition, const Vector& mu);

/// Bayes inversion w(j, i) = p(j, i) mu(j) / mu_pred(i). Columns whose
/// predicted probability falls below tol::probability_floor are replaced
/// by the normalized prior column of p.
MixingWeights mixing_weights(const Matrix& transition, const Vector& mu);

/// Mixed initial conditions, computed in the fused space and projected
/// back to each model's native space:
///   xbar_i = sum_j w(j, i) x_j,
///   Cbar_i = sum_j w(j, i) (C_j + (xbar_i - x_j)(xbar_i - x_j)^T).
std::vector<GaussianState> mix_estimates(const ModelSet& set,
                                         const BankState& bank,
                                         const MixingWeights& weights);

/// One IMM cycle: (1) mode-probability prediction and mixing weights,
/// (2) mixed initial conditions, (3) r parallel Kalman filters with
/// per-model log-likelihoods, (4) mu_i proportional to mu_pred_i * L_i,
/// (5) moment-matched fusion.
ImmStepResult imm_step(const ModelSet& set, const BankState& bank,
                       const Vector& y);

}  // namespace mmest
