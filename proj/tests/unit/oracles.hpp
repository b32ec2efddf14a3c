#pragma once

// Reference implementations used only by the tests. They are written
// independently of the library: composite Simpson instead of Gauss-Legendre,
// direct double loops instead of the vectorized kernel sums.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double phi_k1(double s) {
  if (std::abs(s) > 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return u * u * u;
}
inline double phi_k1_d1(double s) {
  if (std::abs(s) > 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return -6.0 * s * u * u;
}
inline double phi_k1_d2(double s) {
  if (std::abs(s) > 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return -6.0 * u * u + 24.0 * s * s * u;
}

inline int panels_for(double t) { return 2000 + 200 * static_cast<int>(std::abs(t)); }

// K1(t) = (1/pi) int_0^1 (1-s^2)^3 cos(ts) ds
inline double k1(double t) {
  return simpson([t](double s) { return phi_k1(s) * std::cos(t * s); }, 0.0, 1.0, panels_for(t)) /
         kPi;
}
inline double k1_dd(double t) {
  return -simpson([t](double s) { return s * s * phi_k1(s) * std::cos(t * s); }, 0.0, 1.0,
                  panels_for(t)) /
         kPi;
}
inline double k2(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi); }

// phi_U for a Laplace (kind 1) or Gaussian (kind 2) error with SD sigma; kind 0 is no error.
inline double phi_u(int kind, double sigma, double t) {
  if (kind == 1) return 1.0 / (1.0 + 0.5 * sigma * sigma * t * t);
  if (kind == 2) return std::exp(-0.5 * sigma * sigma * t * t);
  return 1.0;
}

// K_{U,l}(t) through its real reduction.
//   l = 0:  (1/pi) int_0^1 phi(s) cos(ts) / phi_U(s/h) ds
//   l = 1: -(1/pi) int_0^1 phi'(s) sin(ts) / phi_U(s/h) ds
//   l = 2: -(1/pi) int_0^1 phi''(s) cos(ts) / phi_U(s/h) ds
inline double ku(int ell, double t, double h, int kind, double sigma) {
  auto f = [&](double s) {
    const double pu = phi_u(kind, sigma, s / h);
    if (ell == 0) return phi_k1(s) * std::cos(t * s) / pu;
    if (ell == 1) return -phi_k1_d1(s) * std::sin(t * s) / pu;
    return -phi_k1_d2(s) * std::cos(t * s) / pu;
  };
  return simpson(f, 0.0, 1.0, panels_for(t)) / kPi;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}
inline double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Hausdorff distance as sup_z |d(z, A) - d(z, B)|; for finite sets the sup
// is attained on A u B.
inline double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  auto dist = [](double z, const std::vector<double>& s) {
    double m = INFINITY;
    for (double q : s) m = std::min(m, std::abs(z - q));
    return m;
  };
  double d = 0.0;
  for (const auto* s : {&a, &b})
    for (double z : *s) d = std::max(d, std::abs(dist(z, a) - dist(z, b)));
  return d;
}

}  // namespace oracle
