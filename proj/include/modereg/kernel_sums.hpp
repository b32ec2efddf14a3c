#pragma once

#include <span>

// Inner loops over observations. Compiled with vectorized exp; every input
// must be finite.
namespace modereg::sums {

//! Sums over j of c_j K2(t_j) Y_j and c_j K2(t_j), t_j = (Y_j - y0) / h2,
//! plus the largest |c_j K2(t_j)|. The common 1/sqrt(2 pi) is included.
struct Shift {
  double num;
  double den;
  double max_abs;
};
Shift shift(std::span<const double> c, std::span<const double> y, double y0,
            double inv_h2) noexcept;

//! Sums over j of c_j K2(t_j), c_j K2(t_j) t_j, c_j K2''(t_j) and
//! |c_j K2(t_j)|.
struct Profile {
  double g0;
  double g1;
  double g2;
  double abs0;
};
Profile profile(std::span<const double> c, std::span<const double> y, double y0,
                double inv_h2) noexcept;

//! out[i + k n] = N(0, bw^2) density at y_i - y_k (column-major n x n,
//! allocated by the caller). Raw storage on purpose: this file is built with
//! different vector flags, so Eigen objects must not cross it.
void gaussian_gram(std::span<const double> y, double bw, double* out) noexcept;

}  // namespace modereg::sums
