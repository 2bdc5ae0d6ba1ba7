#include "mmest/models.hpp"

#include <cmath>
#include <utility>

namespace mmest {

GaussianState::GaussianState(Vector mean_in, Matrix cov_in, int time_index_in,
                             StateTag tag_in)
    : mean(std::move(mean_in)),
      cov(std::move(cov_in)),
      time_index(time_index_in),
      tag(tag_in) {
  check_finite(mean, "GaussianState mean");
  check_finite(cov, "GaussianState cov");
  if (cov.rows() != cov.cols() || cov.rows() != mean.size()) {
    throw DimensionMismatch("GaussianState: cov must be n x n for mean of n");
  }
  if (!is_symmetric(cov)) {
    throw InvalidParameter("GaussianState: covariance not symmetric");
  }
  if (!is_psd_within_floor(cov, psd_floor_for(cov))) {
    throw InvalidParameter("GaussianState: covariance not PSD");
  }
}

StateSpaceModel make_model(Matrix A, Matrix B, Matrix H, Matrix Q, Matrix R,
                           std::string name, double process_noise_variance) {
  StateSpaceModel m{std::move(A), std::move(B), std::move(H),
                    std::move(Q), std::move(R), std::move(name),
                    process_noise_variance};
  check_finite(m.A, "model A");
  check_finite(m.B, "model B");
  check_finite(m.H, "model H");
  check_finite(m.Q, "model Q");
  check_finite(m.R, "model R");
  const Index n = m.A.rows();
  if (m.A.cols() != n) {
    throw DimensionMismatch("model " + m.name + ": A not square");
  }
  if (m.B.rows() != n) {
    throw DimensionMismatch("model " + m.name + ": B rows != state dim");
  }
  if (m.H.cols() != n) {
    throw DimensionMismatch("model " + m.name + ": H cols != state dim");
  }
  if (m.Q.rows() != n || m.Q.cols() != n) {
    throw DimensionMismatch("model " + m.name + ": Q not n x n");
  }
  if (m.R.rows() != m.H.rows() || m.R.cols() != m.H.rows()) {
    throw DimensionMismatch("model " + m.name + ": R not d x d");
  }
  if (!is_symmetric(m.Q) || !is_psd_within_floor(m.Q, psd_floor_for(m.Q))) {
    throw InvalidParameter("model " + m.name + ": Q not symmetric PSD");
  }
  if (!is_symmetric(m.R)) {
    throw InvalidParameter("model " + m.name + ": R not symmetric");
  }
  Eigen::LLT<Matrix> llt(m.R);
  if (llt.info() != Eigen::Success) {
    throw InvalidParameter("model " + m.name + ": R not positive definite");
  }
  if (process_noise_variance < 0.0) {
    throw InvalidParameter("model " + m.name +
                           ": negative process noise variance");
  }
  return m;
}

StateSpaceModel cv_model(double T, double sigma_w2, double sigma_e2) {
  if (!(T > 0.0)) throw InvalidParameter("cv_model: T must be positive");
  if (sigma_w2 < 0.0) throw InvalidParameter("cv_model: sigma_w2 negative");
  if (!(sigma_e2 > 0.0)) {
    throw InvalidParameter("cv_model: sigma_e2 must be positive");
  }
  Matrix A(2, 2);
  A << 1.0, T, 0.0, 1.0;
  Matrix B(2, 1);
  B << 0.5 * T * T, T;
  Matrix H(1, 2);
  H << 1.0, 0.0;
  Matrix Q(2, 2);
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double T4 = T3 * T;
  Q << 0.25 * T4, T3 / 3.0, T3 / 3.0, T2;
  Q *= sigma_w2;
  Matrix R(1, 1);
  R << sigma_e2;
  return make_model(std::move(A), std::move(B), std::move(H), std::move(Q),
                    std::move(R), "CV", sigma_w2);
}

StateSpaceModel ca_model(double T, double sigma_w2, double sigma_e2) {
  if (!(T > 0.0)) throw InvalidParameter("ca_model: T must be positive");
  if (sigma_w2 < 0.0) throw InvalidParameter("ca_model: sigma_w2 negative");
  if (!(sigma_e2 > 0.0)) {
    throw InvalidParameter("ca_model: sigma_e2 must be positive");
  }
  Matrix A(3, 3);
  A << 1.0, T, 0.5 * T * T, 0.0, 1.0, T, 0.0, 0.0, 1.0;
  Matrix B(3, 1);
  B << 0.5 * T * T, T, 1.0;
  Matrix H(1, 3);
  H << 1.0, 0.0, 0.0;
  Matrix Q = B * sigma_w2 * B.transpose();
  Matrix R(1, 1);
  R << sigma_e2;
  return make_model(std::move(A), std::move(B), std::move(H), std::move(Q),
                    std::move(R), "CA", sigma_w2);
}

void check_probability_vector(const Vector& mu, const char* what) {
  check_finite(mu, what);
  if (mu.size() == 0) {
    throw NotAProbabilityVector(std::string(what) + ": empty");
  }
  if (mu.minCoeff() < 0.0 || mu.maxCoeff() > 1.0 + tol::probability_sum) {
    throw NotAProbabilityVector(std::string(what) +
                                ": entries outside [0, 1]");
  }
  if (std::abs(mu.sum() - 1.0) > tol::probability_sum) {
    throw NotAProbabilityVector(std::string(what) + ": sum " +
                                std::to_string(mu.sum()) + " != 1");
  }
}

ModelSet make_model_set(std::vector<StateSpaceModel> models, Matrix transition,
                        double augmentation_variance) {
  if (models.empty()) {
    throw InvalidParameter("make_model_set: no models");
  }
  const auto r = static_cast<Index>(models.size());
  if (transition.rows() != r || transition.cols() != r) {
    throw DimensionMismatch("make_model_set: transition must be r x r");
  }
  check_finite(transition, "transition");
  if (transition.minCoeff() < 0.0 || transition.maxCoeff() > 1.0) {
    throw NotStochastic("make_model_set: transition entries outside [0, 1]");
  }
  for (Index j = 0; j < r; ++j) {
    const double row_sum = transition.row(j).sum();
    if (std::abs(row_sum - 1.0) > tol::probability_sum) {
      throw NotStochastic("make_model_set: transition row " +
                          std::to_string(j) + " sums to " +
                          std::to_string(row_sum));
    }
  }
  const Index d = models.front().measurement_dim();
  Index fused_dim = 0;
  for (const auto& m : models) {
    fused_dim = std::max(fused_dim, m.state_dim());
    if (m.measurement_dim() != d) {
      throw DimensionMismatch(
          "make_model_set: models disagree on measurement dimension");
    }
  }
  if (augmentation_variance < 0.0) {
    throw InvalidParameter("make_model_set: augmentation_variance negative");
  }
  ModelSet set;
  set.models = std::move(models);
  set.transition = std::move(transition);
  set.fused_dim = fused_dim;
  set.augmentation_variance = augmentation_variance;
  set.lifts.reserve(set.models.size());
  for (const auto& m : set.models) {
    Matrix T = Matrix::Zero(fused_dim, m.state_dim());
    T.topRows(m.state_dim()).setIdentity();
    set.lifts.push_back(std::move(T));
  }
  return set;
}

GaussianState lift_to_fused(const ModelSet& set, std::size_t i,
                            const GaussianState& state) {
  const Matrix& T = set.lifts.at(i);
  if (state.dim() != T.cols()) {
    throw DimensionMismatch("lift_to_fused: state dim != model dim");
  }
  Vector mean = T * state.mean;
  Matrix cov = T * state.cov * T.transpose();
  if (set.augmentation_variance > 0.0) {
    for (Index k = T.cols(); k < set.fused_dim; ++k) {
      cov(k, k) += set.augmentation_variance;
    }
  }
  return GaussianState(std::move(mean), symmetrize(cov), state.time_index,
                       state.tag);
}

GaussianState project_to_model(const ModelSet& set, std::size_t i,
                               const GaussianState& state) {
  const Matrix& T = set.lifts.at(i);
  if (state.dim() != T.rows()) {
    throw DimensionMismatch("project_to_model: state dim != fused dim");
  }
  Vector mean = T.transpose() * state.mean;
  Matrix cov = T.transpose() * state.cov * T;
  return GaussianState(std::move(mean), symmetrize(cov), state.time_index,
                       state.tag);
}

}  // namespace mmest
