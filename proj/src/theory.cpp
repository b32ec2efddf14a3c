#include "modereg/theory.hpp"

#include <cmath>
#include <numbers>

#include "modereg/deconv_kernel.hpp"
#include "modereg/errors.hpp"
#include "modereg/quadrature.hpp"

namespace modereg {

// ---- Taylor2 ----

Taylor2 Taylor2::variable_x(double x) noexcept {
  Taylor2 t(x);
  t.a_[1][0] = 1.0;
  return t;
}

Taylor2 Taylor2::variable_y(double y) noexcept {
  Taylor2 t(y);
  t.a_[0][1] = 1.0;
  return t;
}

double Taylor2::derivative(int i, int j) const noexcept {
  static constexpr double kFact[] = {1.0, 1.0, 2.0, 6.0};
  return a_[i][j] * kFact[i] * kFact[j];
}

Taylor2& Taylor2::operator+=(const Taylor2& o) noexcept {
  for (int i = 0; i <= kOrder; ++i)
    for (int j = 0; i + j <= kOrder; ++j) a_[i][j] += o.a_[i][j];
  return *this;
}

Taylor2& Taylor2::operator-=(const Taylor2& o) noexcept {
  for (int i = 0; i <= kOrder; ++i)
    for (int j = 0; i + j <= kOrder; ++j) a_[i][j] -= o.a_[i][j];
  return *this;
}

Taylor2& Taylor2::operator*=(const Taylor2& o) noexcept {
  Taylor2 r;
  for (int i = 0; i <= kOrder; ++i)
    for (int j = 0; i + j <= kOrder; ++j) {
      double s = 0.0;
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= j; ++l) s += a_[k][l] * o.a_[i - k][j - l];
      r.a_[i][j] = s;
    }
  return *this = r;
}

namespace {

// f(a0 + d) = sum_k c[k] d^k for the nilpotent part d (d^4 = 0).
Taylor2 compose(const Taylor2& a, const std::array<double, 4>& c) {
  Taylor2 d = a;
  d.coef(0, 0) = 0.0;
  Taylor2 out(c[0]), power(1.0);
  for (int k = 1; k <= Taylor2::kOrder; ++k) {
    power *= d;
    Taylor2 term = power;
    term *= Taylor2(c[static_cast<std::size_t>(k)]);
    out += term;
  }
  return out;
}

}  // namespace

Taylor2 exp(const Taylor2& a) noexcept {
  const double e = std::exp(a.value());
  return compose(a, {e, e, e / 2.0, e / 6.0});
}

Taylor2 reciprocal(const Taylor2& a) noexcept {
  const double v = 1.0 / a.value();
  return compose(a, {v, -v * v, v * v * v, -v * v * v * v});
}

// ---- truth ----

AnalyticTruth::AnalyticTruth(Scenario scenario, ErrorModel model)
    : scenario_(scenario), model_(model) {}

JointDerivatives AnalyticTruth::joint(double x, double y) const {
  const double fx = fx_true(x);
  const Taylor2 p = conditional_density(scenario_, Taylor2::variable_x(x),
                                        Taylor2::variable_y(y)) *
                    Taylor2(fx);
  return {p.derivative(0, 0), p.derivative(1, 0), p.derivative(0, 1), p.derivative(2, 0),
          p.derivative(1, 1), p.derivative(0, 2), p.derivative(2, 1), p.derivative(1, 2),
          p.derivative(0, 3), p.derivative(3, 0)};
}

double AnalyticTruth::cond_p_xy(double x, double y) const {
  return conditional_density(scenario_, Taylor2::variable_x(x), Taylor2::variable_y(y))
      .derivative(1, 1);
}

double AnalyticTruth::f_x_prime(double) const noexcept { return 0.0; }

double AnalyticTruth::f_wy(double w, double y) const {
  if (model_.kind() == ErrorKind::NoError) return fx_true(w) * conditional_density(scenario_, w, y);
  const double s = model_.sigma_u();
  std::function<double(double)> fu;
  if (model_.kind() == ErrorKind::Laplace) {
    const double beta = s / std::numbers::sqrt2;
    fu = [beta](double u) { return std::exp(-std::abs(u) / beta) / (2.0 * beta); };
  } else {
    fu = [s](double u) {
      return std::exp(-0.5 * u * u / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
    };
  }
  auto integrand = [&](double x) {
    return 0.25 * conditional_density(scenario_, x, y) * fu(w - x);
  };
  std::vector<double> breaks;
  if (w > kXLow && w < kXHigh) breaks.push_back(w);
  return integrate_pieces(integrand, kXLow, kXHigh, breaks, 1e-10);
}

double AnalyticTruth::mode(double x) const {
  const auto set = modes(x);
  if (set.modes.size() != 1)
    throw DomainError("truth is not unimodal at x = " + std::to_string(x));
  return set.modes.front();
}

// ---- constants ----

double mu2_k1() { return -phi_k1(2, 0.0); }

double eta0(int b) {
  if (b < 0) throw DomainError("smoothness order must be nonnegative");
  auto f = [b](double t) {
    const double phi = phi_k1(0, t);
    return std::pow(std::abs(t), 2 * b) * phi * phi;
  };
  return 2.0 * integrate(f, 0.0, 1.0, 1e-13) / (2.0 * std::numbers::pi);
}

// ---- bias and variance ----

namespace {

struct Ordinary {
  int b;
  double c;
};

Ordinary ordinary_of(const ErrorModel& model) {
  const auto s = model.smoothness();
  if (s.cls != SmoothnessClass::OrdinarySmooth)
    throw DomainError("formula needs an ordinary smooth error distribution");
  return {static_cast<int>(s.order), s.constant};
}

double variance_core(const AnalyticTruth& truth, double h1, double h2, double n, double x,
                     double y) {
  const auto o = ordinary_of(truth.model());
  return eta0(o.b) * truth.f_wy(x, y) /
         (4.0 * std::sqrt(std::numbers::pi) * o.c * o.c * n *
          std::pow(h1, 1 + 2 * o.b) * h2 * h2 * h2);
}

double positive_fx(const AnalyticTruth& truth, double x) {
  const double fx = truth.f_x(x);
  if (!(fx > 0.0)) throw DomainError("f_X vanishes at x = " + std::to_string(x));
  return fx;
}

}  // namespace

double bias_lc(const AnalyticTruth& truth, double h1, double h2, double x) {
  const auto d = truth.joint(x, truth.mode(x));
  return 0.5 * (d.p_xxy * mu2_k1() * h1 * h1 + d.p_yyy * h2 * h2);
}

double bias_lc(const AnalyticTruth& truth, const Bandwidths& bw, double x) {
  return bias_lc(truth, bw.h1, bw.h2, x);
}

double variance_lc_ordinary(const AnalyticTruth& truth, double h1, double h2, double n,
                            double x) {
  return variance_core(truth, h1, h2, n, x, truth.mode(x));
}

double variance_lc_ordinary(const AnalyticTruth& truth, const Bandwidths& bw, double n,
                            double x) {
  return variance_lc_ordinary(truth, bw.h1, bw.h2, n, x);
}

double bias_ll(const AnalyticTruth& truth, double h1, double h2, double x) {
  const double fx = positive_fx(truth, x);
  const double ym = truth.mode(x);
  const auto d = truth.joint(x, ym);
  return ((0.5 * d.p_xxy - truth.f_x_prime(x) * truth.cond_p_xy(x, ym)) * mu2_k1() * h1 * h1 +
          0.5 * d.p_yyy * h2 * h2) /
         fx;
}

double bias_ll(const AnalyticTruth& truth, const Bandwidths& bw, double x) {
  return bias_ll(truth, bw.h1, bw.h2, x);
}

double variance_ll_ordinary(const AnalyticTruth& truth, const Bandwidths& bw, double n,
                            double x) {
  const double fx = positive_fx(truth, x);
  return variance_lc_ordinary(truth, bw, n, x) / (fx * fx);
}

double mise_lc_ordinary(const AnalyticTruth& truth, double h1, double h2, double n, double lo,
                        double hi) {
  auto f = [&](double x) {
    const double ym = truth.mode(x);
    const double pyy = truth.joint(x, ym).p_yy;
    const double bias = bias_lc(truth, h1, h2, x);
    return (bias * bias + variance_lc_ordinary(truth, h1, h2, n, x)) / (pyy * pyy);
  };
  return integrate(f, lo, hi, 1e-8);
}

// ---- optimal bandwidths ----

OptimalBandwidths optimal_bandwidths_ordinary(const AnalyticTruth& truth, double n, int b,
                                              double c, double lo, double hi) {
  if (!(n > 0.0) || b < 1 || !(c > 0.0)) throw DomainError("need n > 0, b >= 1 and c > 0");
  OptimalBandwidths ob{};
  auto integral = [&](int which) {
    auto f = [&, which](double x) {
      const double ym = truth.mode(x);
      const auto d = truth.joint(x, ym);
      const double w = 1.0 / (d.p_yy * d.p_yy);
      switch (which) {
        case 0:
          return w * d.p_xxy * d.p_yyy;
        case 1:
          return w * d.p_xxy * d.p_xxy;
        case 2:
          return w * d.p_yyy * d.p_yyy;
        default:
          return w * truth.f_wy(x, ym);
      }
    };
    return integrate(f, lo, hi, 1e-8);
  };
  for (int k = 0; k < 4; ++k) ob.I[static_cast<std::size_t>(k)] = integral(k);
  const double I1 = ob.I[0], I2 = ob.I[1], I3 = ob.I[2], I4 = ob.I[3];
  const double mu = mu2_k1(), eta = eta0(b);
  const double disc = (b - 1.0) * (b - 1.0) * I1 * I1 + 3.0 * (2.0 * b + 1.0) * I2 * I3;
  if (!(I2 > 0.0) || disc < 0.0)
    throw DomainError("optimal bandwidth formula outside its domain (I2 <= 0 or negative discriminant)");
  ob.r1 = std::sqrt(((b - 1.0) * I1 + std::sqrt(disc)) / (3.0 * mu * I2));
  ob.r2 = std::pow(3.0 * eta * I4 /
                       (4.0 * std::sqrt(std::numbers::pi) * c * c * std::pow(ob.r1, 2 * b + 1) *
                        (ob.r1 * ob.r1 * mu * I1 + I3)),
                   1.0 / (2.0 * b + 8.0));
  ob.h2 = ob.r2 * std::pow(n, -1.0 / (2.0 * b + 8.0));
  ob.h1 = ob.r1 * ob.h2;
  return ob;
}

OptimalBandwidths optimal_bandwidths_ordinary(const AnalyticTruth& truth, double n) {
  const auto o = ordinary_of(truth.model());
  return optimal_bandwidths_ordinary(truth, n, o.b, o.c);
}

double amise_from_integrals(const OptimalBandwidths& ob, double h1, double h2, double n, int b,
                            double c) {
  const double mu = mu2_k1();
  const double h1s = h1 * h1, h2s = h2 * h2;
  return 0.25 * (mu * mu * h1s * h1s * ob.I[1] + 2.0 * mu * h1s * h2s * ob.I[0] +
                 h2s * h2s * ob.I[2]) +
         eta0(b) * ob.I[3] /
             (4.0 * std::sqrt(std::numbers::pi) * c * c * n * std::pow(h1, 2 * b + 1) * h2s * h2);
}

void write_csv(std::ostream& os, const OptimalBandwidths& ob) {
  const auto old = os.precision(17);
  os << "r1,r2,h1,h2,I1,I2,I3,I4\n"
     << ob.r1 << ',' << ob.r2 << ',' << ob.h1 << ',' << ob.h2 << ',' << ob.I[0] << ','
     << ob.I[1] << ',' << ob.I[2] << ',' << ob.I[3] << '\n';
  os.precision(old);
}

double mise_rate_ordinary(double h1, double h2, double n, int b) {
  const double s = h1 * h1 + h2 * h2;
  return s * s + 1.0 / (n * std::pow(h1, 1 + 2 * b) * h2 * h2 * h2);
}

double mise_rate_super(double h1, double h2, double n, int b, double b2, double d2) {
  const double s = h1 * h1 + h2 * h2;
  return s * s + std::exp(2.0 * std::pow(h1, -b) / d2) /
                     (n * std::pow(h1, 1.0 - 2.0 * b2) * h2 * h2 * h2);
}

double super_smooth_h2(double h1, int b) { return std::pow(h1, (b + 2.0) / 2.0); }

}  // namespace modereg
