#include "modereg/kernel_sums.hpp"

#include <cmath>

namespace modereg::sums {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}

Shift shift(std::span<const double> c, std::span<const double> y, double y0,
            double inv_h2) noexcept {
  const std::size_t n = c.size();
  const double* cp = c.data();
  const double* yp = y.data();
  double num = 0.0, den = 0.0, mx = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (yp[j] - y0) * inv_h2;
    const double k = cp[j] * std::exp(-0.5 * t * t);
    num += k * yp[j];
    den += k;
    mx = std::max(mx, std::abs(k));
  }
  return {kInvSqrt2Pi * num, kInvSqrt2Pi * den, kInvSqrt2Pi * mx};
}

Profile profile(std::span<const double> c, std::span<const double> y, double y0,
                double inv_h2) noexcept {
  const std::size_t n = c.size();
  const double* cp = c.data();
  const double* yp = y.data();
  double g0 = 0.0, g1 = 0.0, g2 = 0.0, a0 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (yp[j] - y0) * inv_h2;
    const double k = cp[j] * std::exp(-0.5 * t * t);
    g0 += k;
    g1 += k * t;
    g2 += k * (t * t - 1.0);
    a0 += std::abs(k);
  }
  return {kInvSqrt2Pi * g0, kInvSqrt2Pi * g1, kInvSqrt2Pi * g2, kInvSqrt2Pi * a0};
}

void gaussian_gram(std::span<const double> y, double bw, double* out) noexcept {
  const std::size_t n = y.size();
  const double inv = 1.0 / bw;
  const double norm = kInvSqrt2Pi * inv;
  for (std::size_t k = 0; k < n; ++k) {
    double* col = out + k * n;
    const double yk = y[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double t = (y[i] - yk) * inv;
      col[i] = norm * std::exp(-0.5 * t * t);
    }
  }
}

}  // namespace modereg::sums
