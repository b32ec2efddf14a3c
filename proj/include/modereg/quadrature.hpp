#pragma once

#include <functional>
#include <span>
#include <vector>

namespace modereg {

//! Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;
};

//! n-point rule; nodes found by Newton iteration on P_n. Cached per n.
const GaussLegendreRule& gauss_legendre(int n);

//! Adaptive Gauss-Kronrod integral of f over [a, b] (either may be infinite)
//! to relative tolerance `tol`.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

//! Adaptive integral over [a, b] split at the interior `breaks` (kinks).
double integrate_pieces(const std::function<double(double)>& f, double a,
                        double b, std::span<const double> breaks,
                        double tol = 1e-10);

}  // namespace modereg
