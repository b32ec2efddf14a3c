#pragma once

#include <stdexcept>
#include <string>

namespace modereg {

//! Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

//! Input data violate a structural requirement (sizes, finiteness, variance).
class DataError : public Error {
public:
  using Error::Error;
};

//! The local design matrix at a covariate value is numerically singular.
class SingularDesignError : public Error {
public:
  explicit SingularDesignError(double x)
      : Error("singular local design at x = " + std::to_string(x)), x_(x) {}
  double x() const noexcept { return x_; }

private:
  double x_;
};

//! Too few observations near a covariate value to build starting values.
class InsufficientDataError : public Error {
public:
  using Error::Error;
};

//! Every bandwidth candidate failed during a search.
class SelectionError : public Error {
public:
  using Error::Error;
};

//! Two mode-curve grids that must coincide do not.
class GridMismatchError : public Error {
public:
  using Error::Error;
};

//! Hausdorff distance requested with an empty set.
class UndefinedDistanceError : public Error {
public:
  using Error::Error;
};

//! Invalid run configuration; names the offending field.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace modereg
