#include "modereg/density_est.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modereg/errors.hpp"
#include "modereg/kernel_sums.hpp"

namespace modereg {

// ---- Dataset ----

Dataset::Dataset(std::vector<double> w, std::vector<double> y)
    : w_(std::move(w)), y_(std::move(y)) {
  if (w_.size() != y_.size())
    throw DataError("covariate and response lengths differ");
  if (w_.empty()) throw DataError("dataset is empty");
  for (std::size_t j = 0; j < w_.size(); ++j)
    if (!std::isfinite(w_[j]) || !std::isfinite(y_[j]))
      throw DataError("non-finite value in observation " + std::to_string(j + 1));
}

Dataset Dataset::with_covariate(std::vector<double> w) const { return {std::move(w), y_}; }

Bandwidths::Bandwidths(double h1_, double h2_) : h1(h1_), h2(h2_) {
  if (!(h1 > 0.0) || !(h2 > 0.0) || !std::isfinite(h1) || !std::isfinite(h2))
    throw DomainError("bandwidths must be finite and positive");
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw DataError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---- estimator names ----

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::Naive:
      return "naive";
    case Estimator::LocalConstant:
      return "lc";
    case Estimator::LocalLinear:
      return "ll";
  }
  return "?";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "naive" || name == "N") return Estimator::Naive;
  if (name == "lc" || name == "local-constant" || name == "M0") return Estimator::LocalConstant;
  if (name == "ll" || name == "local-linear" || name == "M1") return Estimator::LocalLinear;
  throw ConfigError("estimator: unknown estimator '" + std::string(name) + "'");
}

ErrorModel effective_model(Estimator e, const ErrorModel& model) noexcept {
  return e == Estimator::Naive ? ErrorModel::none() : model;
}

// ---- estimators ----

namespace {

void check_kernels(const Bandwidths& bw, const DeconvKernels& k) {
  if (bw.h1 != k.h1()) throw DomainError("kernel bandwidth does not match h1");
}

// coef_j = K_{U,l}((W_j - x)/h1) / (n h1)
std::vector<double> kernel_coef(const Dataset& data, const DeconvKernels& k, double x,
                                int ell) {
  const auto w = data.w();
  const double inv_h1 = 1.0 / k.h1();
  const double scale = inv_h1 / static_cast<double>(data.n());
  std::vector<double> c(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) c[j] = scale * k(ell, (w[j] - x) * inv_h1);
  return c;
}

}  // namespace

double joint_density(const Dataset& data, const Bandwidths& bw,
                     const DeconvKernels& kernels, double x, double y) {
  check_kernels(bw, kernels);
  const auto c = kernel_coef(data, kernels, x, 0);
  return sums::profile(c, data.y(), y, 1.0 / bw.h2).g0 / bw.h2;
}

double joint_density(const Dataset& data, const Bandwidths& bw,
                     const ErrorModel& model, double x, double y) {
  return joint_density(data, bw, DeconvKernels::exact(model, bw.h1), x, y);
}

double joint_density_dy(const Dataset& data, const Bandwidths& bw,
                        const DeconvKernels& kernels, double x, double y) {
  check_kernels(bw, kernels);
  const auto c = kernel_coef(data, kernels, x, 0);
  return sums::profile(c, data.y(), y, 1.0 / bw.h2).g1 / (bw.h2 * bw.h2);
}

double joint_density_dy(const Dataset& data, const Bandwidths& bw,
                        const ErrorModel& model, double x, double y) {
  return joint_density_dy(data, bw, DeconvKernels::exact(model, bw.h1), x, y);
}

double s_hat(const Dataset& data, const DeconvKernels& kernels, double x, int ell) {
  if (ell < 0 || ell > 2) throw DomainError("s_hat order must be 0, 1 or 2");
  const auto c = kernel_coef(data, kernels, x, ell);
  return std::accumulate(c.begin(), c.end(), 0.0);
}

double s_hat(const Dataset& data, double h1, const ErrorModel& model, double x, int ell) {
  return s_hat(data, DeconvKernels::exact(model, h1), x, ell);
}

double fx_deconv(const Dataset& data, const DeconvKernels& kernels, double x) {
  return s_hat(data, kernels, x, 0);
}

double fx_deconv(const Dataset& data, double h1, const ErrorModel& model, double x) {
  return s_hat(data, h1, model, x, 0);
}

double t_hat(const Dataset& data, const Bandwidths& bw, const DeconvKernels& kernels,
             double x, double y, int ell, bool deriv) {
  if (ell < 0 || ell > 1) throw DomainError("t_hat order must be 0 or 1");
  check_kernels(bw, kernels);
  const auto c = kernel_coef(data, kernels, x, ell);
  const auto p = sums::profile(c, data.y(), y, 1.0 / bw.h2);
  return deriv ? p.g1 / (bw.h2 * bw.h2) : p.g0 / bw.h2;
}

double t_hat(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
             double x, double y, int ell, bool deriv) {
  return t_hat(data, bw, DeconvKernels::exact(model, bw.h1), x, y, ell, deriv);
}

LocalFit local_fit(const Dataset& data, const DeconvKernels& kernels,
                   Estimator estimator, double x) {
  LocalFit fit;
  fit.x = x;
  fit.coef = kernel_coef(data, kernels, x, 0);
  if (estimator != Estimator::LocalLinear) return fit;

  auto c1 = kernel_coef(data, kernels, x, 1);
  const auto c2 = kernel_coef(data, kernels, x, 2);
  fit.s0 = std::accumulate(fit.coef.begin(), fit.coef.end(), 0.0);
  fit.s1 = std::accumulate(c1.begin(), c1.end(), 0.0);
  fit.s2 = std::accumulate(c2.begin(), c2.end(), 0.0);
  fit.det = fit.s0 * fit.s2 - fit.s1 * fit.s1;
  double abs0 = 0.0;
  for (double c : fit.coef) abs0 += std::abs(c);
  // s1 and s2 can both be rounding noise (all W at x), which a purely
  // relative test would accept.
  const double scale = std::max({std::abs(fit.s0 * fit.s2), fit.s1 * fit.s1, abs0 * abs0});
  if (!(std::abs(fit.det) > kSingularDet * scale)) throw SingularDesignError(x);
  const double a = fit.s2 / fit.det, b = fit.s1 / fit.det;
  for (std::size_t j = 0; j < fit.coef.size(); ++j) fit.coef[j] = a * fit.coef[j] - b * c1[j];
  return fit;
}

FitProfile evaluate(const LocalFit& fit, std::span<const double> y, double h2, double y0) {
  const auto p = sums::profile(fit.coef, y, y0, 1.0 / h2);
  const double h2sq = h2 * h2;
  return {p.g0 / h2, p.g1 / h2sq, p.g2 / (h2sq * h2), p.abs0 / h2sq};
}

double cond_density_ll(const Dataset& data, const Bandwidths& bw,
                       const DeconvKernels& kernels, double x, double y, bool deriv) {
  check_kernels(bw, kernels);
  const auto fit = local_fit(data, kernels, Estimator::LocalLinear, x);
  const auto p = evaluate(fit, data.y(), bw.h2, y);
  return deriv ? p.dy : p.value;
}

double cond_density_ll(const Dataset& data, const Bandwidths& bw,
                       const ErrorModel& model, double x, double y, bool deriv) {
  return cond_density_ll(data, bw, DeconvKernels::exact(model, bw.h1), x, y, deriv);
}

}  // namespace modereg
