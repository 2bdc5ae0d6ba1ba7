#pragma once

#include <Eigen/Dense>

#include "mmest/errors.hpp"

namespace mmest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numeric tolerances used library-wide.
namespace tol {
/// Relative symmetry tolerance for covariance-like matrices.
inline constexpr double symmetry_rel = 1e-9;
/// Relative residual guaranteed by solve_spd on well-posed inputs.
inline constexpr double solve_residual = 1e-10;
/// Probability vectors must sum to one within this bound.
inline constexpr double probability_sum = 1e-12;
/// Mode probabilities are clamped to this floor after normalization.
inline constexpr double probability_floor = 1e-12;
/// PSD checks accept pivots down to -psd_pivot_scale * trace.
inline constexpr double psd_pivot_scale = 1e-10;
}  // namespace tol

/// Throws InvalidParameter if any entry is NaN or infinite.
void check_finite(const Matrix& m, const char* what);
void check_finite(const Vector& v, const char* what);

bool is_symmetric(const Matrix& m, double rel_tol = tol::symmetry_rel);

/// (M + M^T) / 2. M must be square.
Matrix symmetrize(const Matrix& m);

/// Solves M * X = rhs for symmetric positive definite M via Cholesky.
/// Throws NotPositiveDefinite if factorization hits a pivot <= 0,
/// InvalidParameter if M is not square/symmetric, DimensionMismatch on rhs.
Matrix solve_spd(const Matrix& m, const Matrix& rhs);
Vector solve_spd(const Matrix& m, const Vector& rhs);

/// log(det(M)) for SPD M, computed from the Cholesky factor.
double log_det_spd(const Matrix& m);

/// Cholesky-style PSD test: pivots may dip to `pivot_floor` (a small
/// negative number) before the matrix is rejected. Rank deficiency is
/// accepted as long as the trailing column entries are negligible.
bool is_psd_within_floor(const Matrix& m, double pivot_floor);

/// PSD floor used for covariance validation: -psd_pivot_scale * trace.
double psd_floor_for(const Matrix& m);

/// Lower-triangular factor L with L*L^T ~= M for PSD M (pivots clamped at
/// zero, so rank-deficient matrices get zero columns). Used to draw
/// correlated noise. Throws NotPositiveDefinite if M is indefinite.
Matrix psd_factor(const Matrix& m);

}  // namespace mmest
