#include "mmest/linalg.hpp"

#include <cmath>
#include <string>

namespace mmest {

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidParameter(std::string(what) + ": non-finite entries");
  }
}

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidParameter(std::string(what) + ": non-finite entries");
  }
}

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("symmetrize: matrix not square");
  }
  return 0.5 * (m + m.transpose());
}

namespace {

Eigen::LLT<Matrix> factorize_spd(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(what) + ": matrix not square");
  }
  check_finite(m, what);
  if (!is_symmetric(m)) {
    throw InvalidParameter(std::string(what) + ": matrix not symmetric");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string(what) +
                              ": Cholesky pivot <= 0, matrix not SPD");
  }
  return llt;
}

}  // namespace

Matrix solve_spd(const Matrix& m, const Matrix& rhs) {
  if (rhs.rows() != m.rows()) {
    throw DimensionMismatch("solve_spd: rhs row count");
  }
  check_finite(rhs, "solve_spd rhs");
  return factorize_spd(m, "solve_spd").solve(rhs);
}

Vector solve_spd(const Matrix& m, const Vector& rhs) {
  if (rhs.size() != m.rows()) {
    throw DimensionMismatch("solve_spd: rhs size");
  }
  check_finite(rhs, "solve_spd rhs");
  return factorize_spd(m, "solve_spd").solve(rhs);
}

double log_det_spd(const Matrix& m) {
  const auto llt = factorize_spd(m, "log_det_spd");
  // matrixLLT() holds L in the lower triangle; det(M) = prod(diag(L))^2.
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double psd_floor_for(const Matrix& m) {
  return -tol::psd_pivot_scale * std::max(m.trace(), 0.0);
}

bool is_psd_within_floor(const Matrix& m, double pivot_floor) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  const Index n = m.rows();
  // Rank-deficient columns must be (numerically) zero for the matrix to
  // stay PSD; anything larger than this is treated as indefinite.
  const double zero_col_tol = 1e-8 * (std::abs(m.trace()) + 1.0);
  Matrix L = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double d = m(j, j) - L.row(j).head(j).squaredNorm();
    if (d < pivot_floor) return false;
    const double d_eff = std::max(d, 0.0);
    if (d_eff <= 1e-14 * (std::abs(m.trace()) + 1.0)) {
      for (Index i = j + 1; i < n; ++i) {
        const double off = m(i, j) - L.row(i).head(j).dot(L.row(j).head(j));
        if (std::abs(off) > zero_col_tol) return false;
      }
      // L column stays zero.
    } else {
      L(j, j) = std::sqrt(d_eff);
      for (Index i = j + 1; i < n; ++i) {
        L(i, j) =
            (m(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
      }
    }
  }
  return true;
}

Matrix psd_factor(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("psd_factor: matrix not square");
  }
  check_finite(m, "psd_factor");
  if (!is_psd_within_floor(m, psd_floor_for(m))) {
    throw NotPositiveDefinite("psd_factor: matrix not PSD");
  }
  const Index n = m.rows();
  Matrix L = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double d =
        std::max(m(j, j) - L.row(j).head(j).squaredNorm(), 0.0);
    if (d <= 1e-14 * (std::abs(m.trace()) + 1.0)) continue;
    L(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      L(i, j) = (m(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
    }
  }
  return L;
}

}  // namespace mmest
