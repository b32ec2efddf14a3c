#pragma once

#include <array>
#include <ostream>

#include "modereg/dataset.hpp"
#include "modereg/error_model.hpp"
#include "modereg/simulation.hpp"

namespace modereg {

//! Bivariate Taylor polynomial in (dx, dy) truncated at total degree 3.
//! a(i, j) multiplies dx^i dy^j.
class Taylor2 {
public:
  static constexpr int kOrder = 3;

  Taylor2(double c = 0.0) noexcept { a_[0][0] = c; }  // NOLINT: implicit on purpose
  static Taylor2 variable_x(double x) noexcept;
  static Taylor2 variable_y(double y) noexcept;

  double coef(int i, int j) const noexcept { return a_[i][j]; }
  double& coef(int i, int j) noexcept { return a_[i][j]; }
  //! d^(i+j) / dx^i dy^j at the expansion point.
  double derivative(int i, int j) const noexcept;
  double value() const noexcept { return a_[0][0]; }

  Taylor2& operator+=(const Taylor2& o) noexcept;
  Taylor2& operator-=(const Taylor2& o) noexcept;
  Taylor2& operator*=(const Taylor2& o) noexcept;

  friend Taylor2 operator+(Taylor2 a, const Taylor2& b) noexcept { return a += b; }
  friend Taylor2 operator-(Taylor2 a, const Taylor2& b) noexcept { return a -= b; }
  friend Taylor2 operator*(Taylor2 a, const Taylor2& b) noexcept { return a *= b; }
  friend Taylor2 operator/(const Taylor2& a, const Taylor2& b) noexcept {
    return a * reciprocal(b);
  }
  friend Taylor2 operator-(const Taylor2& a) noexcept { return Taylor2(0.0) - a; }

  friend Taylor2 exp(const Taylor2& a) noexcept;
  friend Taylor2 reciprocal(const Taylor2& a) noexcept;

private:
  std::array<std::array<double, kOrder + 1>, kOrder + 1> a_{};
};

//! Partial derivatives of the joint density p(x, y) = f_X(x) p(y | x).
struct JointDerivatives {
  double p, p_x, p_y, p_xx, p_xy, p_yy, p_xxy, p_xyy, p_yyy, p_xxx;
};

//! Analytic truth of a simulation scenario for the asymptotic formulas.
//! f_X is the Uniform(-2, 2) density; formulas are meant for interior x.
class AnalyticTruth {
public:
  AnalyticTruth(Scenario scenario, ErrorModel model);

  Scenario scenario() const noexcept { return scenario_; }
  const ErrorModel& model() const noexcept { return model_; }

  JointDerivatives joint(double x, double y) const;
  double p(double x, double y) const { return joint(x, y).p; }
  double p_y(double x, double y) const { return joint(x, y).p_y; }
  double p_yy(double x, double y) const { return joint(x, y).p_yy; }
  double p_xy(double x, double y) const { return joint(x, y).p_xy; }
  double p_xxy(double x, double y) const { return joint(x, y).p_xxy; }
  double p_yyy(double x, double y) const { return joint(x, y).p_yyy; }
  //! d^2/dx dy of the conditional density p(y | x).
  double cond_p_xy(double x, double y) const;

  double f_x(double x) const noexcept { return fx_true(x); }
  double f_x_prime(double x) const noexcept;
  //! Joint density of (W, Y): the x-convolution of p(., y) with f_U.
  double f_wy(double w, double y) const;

  ModeSet modes(double x) const { return true_mode_set(scenario_, x); }
  //! The single mode at x; DomainError when the truth is not unimodal there.
  double mode(double x) const;

private:
  Scenario scenario_;
  ErrorModel model_;
};

//! mu_2 = int t^2 K1(t) dt = -phi_K1''(0) = 6.
double mu2_k1();
//! eta_0 = (1/2 pi) int |t|^(2b) phi_K1(t)^2 dt.
double eta0(int b);

//! Dominating bias of the local constant density-derivative estimator at the
//! mode: 0.5 (p_xxy mu2 h1^2 + p_yyy h2^2).
double bias_lc(const AnalyticTruth& truth, const Bandwidths& bw, double x);
double bias_lc(const AnalyticTruth& truth, double h1, double h2, double x);
//! eta0 f_WY / (4 sqrt(pi) c^2 n h1^(1+2b) h2^3) for ordinary smooth error.
double variance_lc_ordinary(const AnalyticTruth& truth, const Bandwidths& bw, double n, double x);
double variance_lc_ordinary(const AnalyticTruth& truth, double h1, double h2, double n, double x);

//! Local linear counterparts; DomainError where f_X(x) = 0.
double bias_ll(const AnalyticTruth& truth, const Bandwidths& bw, double x);
double bias_ll(const AnalyticTruth& truth, double h1, double h2, double x);
double variance_ll_ordinary(const AnalyticTruth& truth, const Bandwidths& bw, double n, double x);

//! Asymptotic MISE of the local constant mode estimator, assembled by
//! integrating (bias^2 + variance) / p_yy^2 over [lo, hi] directly.
double mise_lc_ordinary(const AnalyticTruth& truth, double h1, double h2, double n,
                        double lo = kXLow, double hi = kXHigh);

struct OptimalBandwidths {
  double h1, h2, r1, r2;
  std::array<double, 4> I;  // I1..I4
};

//! Closed-form minimizer of the asymptotic MISE for ordinary smooth error of
//! order b with constant c; I-integrals over [lo, hi].
OptimalBandwidths optimal_bandwidths_ordinary(const AnalyticTruth& truth, double n, int b,
                                              double c, double lo = kXLow,
                                              double hi = kXHigh);
//! Using the truth's own error model (must be ordinary smooth).
OptimalBandwidths optimal_bandwidths_ordinary(const AnalyticTruth& truth, double n);

//! The asymptotic MISE expressed through I1..I4.
double amise_from_integrals(const OptimalBandwidths& ob, double h1, double h2, double n,
                            int b, double c);

void write_csv(std::ostream& os, const OptimalBandwidths& ob);

// Rate calculators (orders of magnitude, unspecified constants).

//! (h1^2 + h2^2)^2 + 1 / (n h1^(1+2b) h2^3).
double mise_rate_ordinary(double h1, double h2, double n, int b);
//! (h1^2 + h2^2)^2 + exp(2 h1^-b / d2) / (n h1^(1-2 b2) h2^3).
double mise_rate_super(double h1, double h2, double n, int b, double b2, double d2);
//! h2 with h1 ~ h2^(2/(b+2)) for super smooth error.
double super_smooth_h2(double h1, int b);

}  // namespace modereg
