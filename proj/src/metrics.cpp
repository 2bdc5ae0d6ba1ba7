#include "mmest/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mmest {

std::vector<double> rmse(const std::vector<std::vector<double>>& errors) {
  if (errors.empty()) {
    throw EmptyInput("rmse: no runs");
  }
  const std::size_t n_steps = errors.front().size();
  for (const auto& run : errors) {
    if (run.size() != n_steps) {
      throw DimensionMismatch("rmse: runs have different step counts");
    }
  }
  std::vector<double> out(n_steps, 0.0);
  for (const auto& run : errors) {
    for (std::size_t k = 0; k < n_steps; ++k) {
      out[k] += run[k] * run[k];
    }
  }
  const double n_runs = static_cast<double>(errors.size());
  for (auto& v : out) {
    v = std::sqrt(v / n_runs);
  }
  return out;
}

NeesResult nees(const GaussianState& estimate, const Vector& truth) {
  if (truth.size() != estimate.dim()) {
    throw DimensionMismatch("nees: truth dim != estimate dim");
  }
  check_finite(truth, "nees truth");
  const Vector error = truth - estimate.mean;
  try {
    return NeesResult{error.dot(solve_spd(estimate.cov, error)), false};
  } catch (const NotPositiveDefinite&) {
    // fall through to regularization
  }
  const Index n = estimate.dim();
  const Matrix regularized =
      estimate.cov + 1e-12 * estimate.cov.trace() * Matrix::Identity(n, n);
  try {
    return NeesResult{error.dot(solve_spd(regularized, error)), true};
  } catch (const NotPositiveDefinite&) {
    throw SingularCovariance("nees: covariance singular after regularization");
  }
}

namespace {

constexpr int kMaxIterations = 2000000;

// Series expansion of P(a, x), valid for x < a + 1.
double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double upper_gamma_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0)) {
    throw InvalidParameter("regularized_lower_gamma: a must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    return lower_gamma_series(a, x);
  }
  return 1.0 - upper_gamma_cf(a, x);
}

double chi_square_cdf(double x, double dof) {
  if (!(dof > 0.0)) {
    throw InvalidParameter("chi_square_cdf: dof must be positive");
  }
  return regularized_lower_gamma(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, double dof) {
  if (!(dof > 0.0)) {
    throw InvalidParameter("chi_square_quantile: dof must be positive");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw InvalidParameter("chi_square_quantile: p must lie in [0, 1)");
  }
  if (p == 0.0) return 0.0;
  double lo = 0.0;
  double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
  while (chi_square_cdf(hi, dof) < p) {
    hi *= 2.0;
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at double resolution
    if (chi_square_cdf(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

NeesInterval nees_interval(int dim, int runs, double level) {
  if (dim < 1) throw InvalidParameter("nees_interval: dim must be >= 1");
  if (runs < 1) throw InvalidParameter("nees_interval: runs must be >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidParameter("nees_interval: level must lie in (0, 1)");
  }
  const double dof = static_cast<double>(runs) * static_cast<double>(dim);
  const double alpha = 1.0 - level;
  const double n = static_cast<double>(runs);
  NeesInterval out;
  out.lower = chi_square_quantile(0.5 * alpha, dof) / n;
  out.upper = chi_square_quantile(1.0 - 0.5 * alpha, dof) / n;
  out.dim = dim;
  out.runs = runs;
  out.level = level;
  return out;
}

}  // namespace mmest
