#pragma once

#include "mmest/models.hpp"

namespace mmest {

/// Innovation y~ = y - H x^ and its covariance S = R + H C H^T, kept
/// together with the predicted measurement they were derived from.
struct Innovation {
  Vector residual;
  Matrix cov;
  Vector predicted_measurement;

  Innovation(Vector residual_in, Matrix cov_in, Vector predicted_in);

  Index dim() const { return residual.size(); }
};

/// Prediction step: mean = A x + B u, cov = sym(A C A^T + Q), advancing
/// the time index. `state` must be tagged filtered.
GaussianState predict(const StateSpaceModel& model, const GaussianState& state);
GaussianState predict(const StateSpaceModel& model, const GaussianState& state,
                      const Vector& u);

/// Innovation for measurement y against a predicted state.
Innovation innovate(const StateSpaceModel& model, const GaussianState& predicted,
                    const Vector& y);

/// Filter step: K = C H^T S^-1 (via SPD solve), mean = x + K y~,
/// cov = sym(C - K H C). Throws SingularInnovationCovariance if S cannot
/// be factorized.
GaussianState update(const StateSpaceModel& model, const GaussianState& predicted,
                     const Vector& y);

/// log N(y~; 0, S) = -(d ln 2pi + log det S + y~^T S^-1 y~) / 2.
double log_likelihood(const Innovation& inn);

}  // namespace mmest
