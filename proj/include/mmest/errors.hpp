#pragma once

#include <stdexcept>
#include <string>

namespace mmest {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A Cholesky pivot was <= 0 while factorizing a matrix assumed SPD.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NotStochastic : public Error {
 public:
  using Error::Error;
};

class NotAProbabilityVector : public Error {
 public:
  using Error::Error;
};

/// Residual covariance S could not be factorized during update/likelihood.
class SingularInnovationCovariance : public Error {
 public:
  using Error::Error;
};

/// All weighted model likelihoods vanished at working precision.
class DegenerateLikelihoods : public Error {
 public:
  using Error::Error;
};

/// Estimate covariance unusable for NEES even after regularization.
class SingularCovariance : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmest
