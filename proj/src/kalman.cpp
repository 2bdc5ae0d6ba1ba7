#include "mmest/kalman.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace mmest {

Innovation::Innovation(Vector residual_in, Matrix cov_in, Vector predicted_in)
    : residual(std::move(residual_in)),
      cov(std::move(cov_in)),
      predicted_measurement(std::move(predicted_in)) {
  check_finite(residual, "Innovation residual");
  check_finite(cov, "Innovation cov");
  if (cov.rows() != cov.cols() || cov.rows() != residual.size() ||
      predicted_measurement.size() != residual.size()) {
    throw DimensionMismatch("Innovation: inconsistent dimensions");
  }
  if (!is_symmetric(cov)) {
    throw InvalidParameter("Innovation: covariance not symmetric");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw SingularInnovationCovariance(
        "Innovation: residual covariance not positive definite");
  }
}

namespace {

GaussianState predict_impl(const StateSpaceModel& model,
                           const GaussianState& state, const Vector* u) {
  if (state.tag != StateTag::filtered) {
    throw InvalidParameter("predict: state must be tagged filtered");
  }
  if (state.dim() != model.state_dim()) {
    throw DimensionMismatch("predict: state dim != model dim");
  }
  Vector mean = model.A * state.mean;
  if (u != nullptr) {
    if (u->size() != model.B.cols()) {
      throw DimensionMismatch("predict: control dim != B cols");
    }
    check_finite(*u, "predict control");
    mean += model.B * (*u);
  }
  Matrix cov = symmetrize(model.A * state.cov * model.A.transpose() + model.Q);
  return GaussianState(std::move(mean), std::move(cov), state.time_index + 1,
                       StateTag::predicted);
}

}  // namespace

GaussianState predict(const StateSpaceModel& model,
                      const GaussianState& state) {
  return predict_impl(model, state, nullptr);
}

GaussianState predict(const StateSpaceModel& model, const GaussianState& state,
                      const Vector& u) {
  return predict_impl(model, state, &u);
}

Innovation innovate(const StateSpaceModel& model,
                    const GaussianState& predicted, const Vector& y) {
  if (predicted.tag != StateTag::predicted) {
    throw InvalidParameter("innovate: state must be tagged predicted");
  }
  if (predicted.dim() != model.state_dim()) {
    throw DimensionMismatch("innovate: state dim != model dim");
  }
  if (y.size() != model.measurement_dim()) {
    throw DimensionMismatch("innovate: measurement dim != H rows");
  }
  check_finite(y, "measurement");
  Vector predicted_measurement = model.H * predicted.mean;
  Vector residual = y - predicted_measurement;
  Matrix cov = symmetrize(model.R +
                          model.H * predicted.cov * model.H.transpose());
  return Innovation(std::move(residual), std::move(cov),
                    std::move(predicted_measurement));
}

GaussianState update(const StateSpaceModel& model,
                     const GaussianState& predicted, const Vector& y) {
  const Innovation inn = innovate(model, predicted, y);
  Matrix gain;
  try {
    // K = C H^T S^-1, obtained from S K^T = H C.
    gain = solve_spd(inn.cov, Matrix(model.H * predicted.cov)).transpose();
  } catch (const NotPositiveDefinite&) {
    throw SingularInnovationCovariance(
        "update: residual covariance not positive definite");
  }
  Vector mean = predicted.mean + gain * inn.residual;
  Matrix cov = symmetrize(predicted.cov - gain * model.H * predicted.cov);
  return GaussianState(std::move(mean), std::move(cov), predicted.time_index,
                       StateTag::filtered);
}

double log_likelihood(const Innovation& inn) {
  const auto d = static_cast<double>(inn.dim());
  try {
    const double quad = inn.residual.dot(solve_spd(inn.cov, inn.residual));
    return -0.5 * (d * std::log(2.0 * std::numbers::pi) +
                   log_det_spd(inn.cov) + quad);
  } catch (const NotPositiveDefinite&) {
    throw SingularInnovationCovariance(
        "log_likelihood: residual covariance not positive definite");
  }
}

}  // namespace mmest
