#include "modereg/error_model.hpp"

#include <cmath>
#include <numbers>

#include "modereg/errors.hpp"
#include "modereg/random.hpp"

namespace modereg {

namespace {

void check_sigma(double sigma_u) {
  if (!(sigma_u >= 0.0) || !std::isfinite(sigma_u))
    throw DomainError("sigma_u must be finite and nonnegative");
}

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

ErrorModel ErrorModel::laplace(double sigma_u) {
  check_sigma(sigma_u);
  if (sigma_u == 0.0) return none();
  return {ErrorKind::Laplace, sigma_u};
}

ErrorModel ErrorModel::gaussian(double sigma_u) {
  check_sigma(sigma_u);
  if (sigma_u == 0.0) return none();
  return {ErrorKind::Gaussian, sigma_u};
}

ErrorModel ErrorModel::make(ErrorKind kind, double sigma_u) {
  switch (kind) {
    case ErrorKind::NoError:
      if (sigma_u != 0.0) throw DomainError("NoError requires sigma_u = 0");
      return none();
    case ErrorKind::Laplace:
      return laplace(sigma_u);
    case ErrorKind::Gaussian:
      return gaussian(sigma_u);
  }
  return none();
}

Smoothness ErrorModel::smoothness() const noexcept {
  switch (kind_) {
    case ErrorKind::Laplace:
      return {SmoothnessClass::OrdinarySmooth, 2.0, 2.0 / variance()};
    case ErrorKind::Gaussian:
      return {SmoothnessClass::SuperSmooth, 2.0, 2.0 / variance()};
    case ErrorKind::NoError:
      break;
  }
  return {};
}

double ErrorModel::phi(double t) const noexcept {
  const double s2t2 = variance() * t * t;
  switch (kind_) {
    case ErrorKind::Laplace:
      return 1.0 / (1.0 + 0.5 * s2t2);
    case ErrorKind::Gaussian:
      return std::exp(-0.5 * s2t2);
    case ErrorKind::NoError:
      break;
  }
  return 1.0;
}

double phi_u(const ErrorModel& model, double t) noexcept { return model.phi(t); }

std::vector<double> sample_errors(const ErrorModel& model, std::size_t n,
                                  std::uint64_t seed) {
  std::vector<double> out(n, 0.0);
  if (model.kind() == ErrorKind::NoError) return out;
  Rng rng(seed);
  if (model.kind() == ErrorKind::Laplace) {
    const double scale = model.sigma_u() / std::numbers::sqrt2;
    for (auto& u : out) {
      // inverse CDF on a symmetric uniform
      const double p = open_unit(rng) - 0.5;
      u = -scale * std::copysign(std::log1p(-2.0 * std::abs(p)), p);
    }
  } else {
    std::normal_distribution<double> normal(0.0, model.sigma_u());
    for (auto& u : out) u = normal(rng);
  }
  return out;
}

double sigma2_from_reliability(double var_x, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw DomainError("reliability ratio must lie in (0, 1]");
  if (!(var_x > 0.0)) throw DomainError("Var(X) must be positive");
  return var_x * (1.0 - lambda) / lambda;
}

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Laplace:
      return "laplace";
    case ErrorKind::Gaussian:
      return "gaussian";
    case ErrorKind::NoError:
      break;
  }
  return "none";
}

ErrorKind parse_error_kind(std::string_view name) {
  if (name == "none" || name == "noerror" || name == "NoError") return ErrorKind::NoError;
  if (name == "laplace" || name == "Laplace") return ErrorKind::Laplace;
  if (name == "gaussian" || name == "normal" || name == "Gaussian") return ErrorKind::Gaussian;
  throw ConfigError("error.kind: unknown error law '" + std::string(name) + "'");
}

}  // namespace modereg
