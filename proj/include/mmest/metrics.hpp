#pragma once

#include <vector>

#include "mmest/models.hpp"

namespace mmest {

/// Chi-square acceptance region for the mean NEES of `runs` independent
/// runs of a consistent dim-dimensional filter.
struct NeesInterval {
  double lower = 0.0;
  double upper = 0.0;
  int dim = 0;
  int runs = 0;
  double level = 0.0;
};

/// Per-step RMSE over runs: RMSE_k = sqrt(mean_runs(error_k^2)).
/// `errors` is indexed [run][step]; all runs must share a length.
/// Throws EmptyInput when there are no runs.
std::vector<double> rmse(const std::vector<std::vector<double>>& errors);

struct NeesResult {
  double value = 0.0;
  /// True when the covariance needed +1e-12 * trace * I to factorize.
  bool regularized = false;
};

/// (x - x^)^T C^-1 (x - x^) via SPD solve. Throws SingularCovariance when
/// even the regularized covariance cannot be factorized.
NeesResult nees(const GaussianState& estimate, const Vector& truth);

/// [chi2_{runs*dim}(a/2), chi2_{runs*dim}(1 - a/2)] / runs with
/// a = 1 - level.
NeesInterval nees_interval(int dim, int runs, double level);

/// Regularized lower incomplete gamma P(a, x), a > 0.
double regularized_lower_gamma(double a, double x);

/// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi_square_cdf(double x, double dof);

/// Quantile by bisection on the CDF, to 1e-9 absolute in x.
double chi_square_quantile(double p, double dof);

}  // namespace mmest
