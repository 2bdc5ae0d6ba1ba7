#pragma once

#include <string>
#include <vector>

#include "mmest/linalg.hpp"

namespace mmest {

enum class StateTag { predicted, filtered };

/// Gaussian belief over a state at a tagged time index. Construction
/// validates symmetry (relative 1e-9) and positive semidefiniteness
/// (Cholesky with pivot floor -1e-10 * trace).
struct GaussianState {
  Vector mean;
  Matrix cov;
  int time_index = 0;
  StateTag tag = StateTag::filtered;

  GaussianState(Vector mean_in, Matrix cov_in, int time_index_in,
                StateTag tag_in);

  Index dim() const { return mean.size(); }
};

/// One linear-Gaussian mode: x+ = A x + B u + w, y = H x + e,
/// w ~ N(0, Q) in state space, e ~ N(0, R).
///
/// Q is stored in full state-space form (the matrix added during the
/// covariance prediction). For simulation, process noise is injected as
/// B * w with w ~ N(0, process_noise_variance * I); for the CV/CA
/// factories that variance is the sigma_w2 argument.
struct StateSpaceModel {
  Matrix A;  // state transition, n x n
  Matrix B;  // noise/input gain, n x m
  Matrix H;  // measurement map, d x n
  Matrix Q;  // process-noise covariance in state space, n x n
  Matrix R;  // measurement-noise covariance, d x d
  std::string name;
  double process_noise_variance = 1.0;

  Index state_dim() const { return A.rows(); }
  Index noise_dim() const { return B.cols(); }
  Index measurement_dim() const { return H.rows(); }
};

/// Builds a model from explicit matrices, validating all invariants.
StateSpaceModel make_model(Matrix A, Matrix B, Matrix H, Matrix Q, Matrix R,
                           std::string name,
                           double process_noise_variance = 1.0);

/// Constant-velocity model, state (position, velocity):
///   A = [[1, T], [0, 1]],  B = [T^2/2, T]^T,  H = [1, 0],
///   Q = [[T^4/4, T^3/3], [T^3/3, T^2]] * sigma_w2,  R = [sigma_e2].
StateSpaceModel cv_model(double T, double sigma_w2, double sigma_e2);

/// Constant-acceleration model, state (position, velocity, acceleration):
///   A = [[1, T, T^2/2], [0, 1, T], [0, 0, 1]],  B = [T^2/2, T, 1]^T,
///   H = [1, 0, 0],  Q = B * sigma_w2 * B^T,  R = [sigma_e2].
StateSpaceModel ca_model(double T, double sigma_w2, double sigma_e2);

/// r models bound to a Markov transition matrix and a common fused state
/// space of dimension max n_i. transition(j, i) is the probability of
/// switching from model j to model i; rows sum to one.
///
/// State components are ordered (position, velocity, acceleration), so
/// each lift T_i embeds model i's state into the leading fused
/// coordinates: T_i = [I; 0], with T_i^T T_i = I.
struct ModelSet {
  std::vector<StateSpaceModel> models;
  Matrix transition;
  std::vector<Matrix> lifts;
  Index fused_dim = 0;
  /// Prior variance assigned to fused components a model does not carry
  /// when its estimate is lifted (0 keeps the hard zero embedding).
  double augmentation_variance = 0.0;

  std::size_t size() const { return models.size(); }
};

ModelSet make_model_set(std::vector<StateSpaceModel> models, Matrix transition,
                        double augmentation_variance = 0.0);

/// Embeds a model-space estimate into the fused space: mean T_i x,
/// cov T_i C T_i^T plus augmentation_variance on the missing diagonal.
GaussianState lift_to_fused(const ModelSet& set, std::size_t i,
                            const GaussianState& state);

/// Projects a fused-space estimate onto model i: mean T_i^T x, cov T_i^T C T_i.
GaussianState project_to_model(const ModelSet& set, std::size_t i,
                               const GaussianState& state);

/// Throws NotAProbabilityVector unless entries lie in [0,1] and sum to 1
/// within tol::probability_sum.
void check_probability_vector(const Vector& mu, const char* what);

}  // namespace mmest
