#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace modereg {

enum class ErrorKind { NoError, Laplace, Gaussian };

enum class SmoothnessClass { Degenerate, OrdinarySmooth, SuperSmooth };

//! Tail class of the error characteristic function.
//!
//! OrdinarySmooth: t^order * phi_U(t) -> constant as t -> inf.
//! SuperSmooth: |phi_U(t)| ~ exp(-|t|^order / constant); `constant` is d2.
struct Smoothness {
  SmoothnessClass cls = SmoothnessClass::Degenerate;
  double order = 0.0;
  double constant = 0.0;
};

//! Known law of the additive measurement error U in W = X + U.
//!
//! Laplace is parameterized by its standard deviation sigma_u, so its scale
//! is sigma_u / sqrt(2). Instances are immutable.
class ErrorModel {
public:
  ErrorModel() = default;

  static ErrorModel none() { return {}; }
  static ErrorModel laplace(double sigma_u);
  static ErrorModel gaussian(double sigma_u);
  //! Builds the model of `kind` with standard deviation sigma_u. A zero
  //! sigma_u always yields NoError.
  static ErrorModel make(ErrorKind kind, double sigma_u);

  ErrorKind kind() const noexcept { return kind_; }
  double sigma_u() const noexcept { return sigma_u_; }
  double variance() const noexcept { return sigma_u_ * sigma_u_; }
  Smoothness smoothness() const noexcept;

  //! Characteristic function phi_U(t); real and even for every supported law.
  double phi(double t) const noexcept;

  bool operator==(const ErrorModel&) const = default;

private:
  ErrorModel(ErrorKind kind, double sigma_u) : kind_(kind), sigma_u_(sigma_u) {}

  ErrorKind kind_ = ErrorKind::NoError;
  double sigma_u_ = 0.0;
};

double phi_u(const ErrorModel& model, double t) noexcept;

//! n independent draws of U; deterministic in `seed`.
std::vector<double> sample_errors(const ErrorModel& model, std::size_t n,
                                  std::uint64_t seed);

//! sigma_u^2 = var_x (1 - lambda) / lambda for reliability ratio lambda.
double sigma2_from_reliability(double var_x, double lambda);

std::string_view to_string(ErrorKind kind) noexcept;
ErrorKind parse_error_kind(std::string_view name);

}  // namespace modereg
