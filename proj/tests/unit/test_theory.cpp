#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "modereg/density_est.hpp"
#include "modereg/errors.hpp"
#include "modereg/theory.hpp"
#include "oracles.hpp"

using namespace modereg;

namespace {

ErrorModel laplace_for(double lambda) {
  SimConfig c;
  c.lambda = lambda;
  return sim_error_model(c);
}

// E[d/dy p_hat(x, y)] for the error-free K1 estimator, which the
// deconvoluting estimator matches in expectation. K2 is folded into the
// mixture analytically; the x-convolution with K1 is done by Simpson.
double population_dy(Scenario s, double x, double y, double h1, double h2) {
  const double lo = std::max(-2.0, x - 60.0 * h1), hi = std::min(2.0, x + 60.0 * h1);
  return oracle::simpson(
      [&](double u) {
        const auto mix = scenario_mixture(s, u);
        double d = 0.0;
        for (int k = 0; k < 2; ++k) {
          const double v = mix.sd[k] * mix.sd[k] + h2 * h2, z = y - mix.mean[k];
          d += 0.5 * (-z / v) * std::exp(-0.5 * z * z / v) / std::sqrt(2.0 * oracle::kPi * v);
        }
        return oracle::k1((x - u) / h1) / h1 * 0.25 * d;
      },
      lo, hi, 4000);
}

struct Moments {
  double mean, var;
};

Moments mc_dy(double lambda, const Bandwidths& bw, int reps, std::size_t n, double x, double y) {
  SimConfig c;
  c.lambda = lambda;
  c.n = n;
  c.seed = 2024;
  const auto kern = DeconvKernels::tabulated(sim_error_model(c), bw.h1, 10.0 / bw.h1);
  std::vector<double> v;
  for (int r = 0; r < reps; ++r) v.push_back(joint_density_dy(generate_dataset(c, r).data, bw, kern, x, y));
  const double sd = oracle::sd(v);
  return {oracle::mean(v), sd * sd};
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("kernel constants") {
  CHECK(mu2_k1() == 6.0);
  // int t^2 K1(t) dt directly; the tail beyond 400 is O(400^-2).
  const double direct = oracle::simpson([](double t) { return t * t * k1(t); }, -400.0, 400.0, 80000);
  CHECK(direct == doctest::Approx(6.0).epsilon(1e-4));

  // (1/2pi) int t^4 (1 - t^2)^6 = B(5/2, 7) / (2 pi)
  const double beta = std::tgamma(2.5) * std::tgamma(7.0) / std::tgamma(9.5);
  const double simpson = oracle::simpson([](double t) { return std::pow(t, 4) * std::pow(1 - t * t, 6); },
                                         -1.0, 1.0, 20000) / (2.0 * oracle::kPi);
  CHECK(std::abs(eta0(2) - beta / (2.0 * oracle::kPi)) < 1e-9);
  CHECK(std::abs(eta0(2) - simpson) < 1e-9);
  CHECK(eta0(2) == doctest::Approx(1.277e-3).epsilon(1e-3));
  CHECK_THROWS_AS(eta0(-1), DomainError);
}

TEST_CASE("Taylor arithmetic") {
  const double x = 0.3, y = -0.7;
  const auto X = Taylor2::variable_x(x), Y = Taylor2::variable_y(y);
  const auto f = exp(X * Y) / (1.0 + X * X);
  // f = e^{xy} / (1 + x^2)
  auto exact = [](double a, double b) { return std::exp(a * b) / (1 + a * a); };
  const double h = 1e-3;
  CHECK(f.value() == doctest::Approx(exact(x, y)).epsilon(1e-14));
  CHECK(f.derivative(0, 1) == doctest::Approx(x * exact(x, y)).epsilon(1e-13));
  CHECK(f.derivative(0, 3) == doctest::Approx(x * x * x * exact(x, y)).epsilon(1e-13));
  const double fxy = (exact(x + h, y + h) - exact(x + h, y - h) - exact(x - h, y + h) + exact(x - h, y - h)) / (4 * h * h);
  CHECK(f.derivative(1, 1) == doctest::Approx(fxy).epsilon(1e-5));
  CHECK((X - X).value() == 0.0);
  CHECK((-X).derivative(1, 0) == -1.0);
}

TEST_CASE("joint density derivatives match finite differences") {
  for (auto s : {Scenario::C1, Scenario::C2}) {
    const AnalyticTruth t(s, laplace_for(0.85));
    for (double x : {-1.2, 0.1, 0.9})
      for (double y : {-5.5, -0.8, 0.4, 1.7}) {
        const double h = 1e-4;
        const auto d = t.joint(x, y);
        const auto xp = t.joint(x + h, y), xm = t.joint(x - h, y);
        const auto yp = t.joint(x, y + h), ym = t.joint(x, y - h);
        auto near = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
        CHECK(near(d.p, 0.25 * conditional_density(s, x, y)));
        CHECK(near(d.p_x, (xp.p - xm.p) / (2 * h)));
        CHECK(near(d.p_y, (yp.p - ym.p) / (2 * h)));
        CHECK(near(d.p_xx, (xp.p_x - xm.p_x) / (2 * h)));
        CHECK(near(d.p_xy, (xp.p_y - xm.p_y) / (2 * h)));
        CHECK(near(d.p_yy, (yp.p_y - ym.p_y) / (2 * h)));
        CHECK(near(d.p_xxy, (xp.p_xy - xm.p_xy) / (2 * h)));
        CHECK(near(d.p_xyy, (yp.p_xy - ym.p_xy) / (2 * h)));
        CHECK(near(d.p_yyy, (yp.p_yy - ym.p_yy) / (2 * h)));
        CHECK(near(d.p_xxx, (xp.p_xx - xm.p_xx) / (2 * h)));
        CHECK(near(t.cond_p_xy(x, y), d.p_xy / 0.25));
      }
  }
}

TEST_CASE("densities integrate to one") {
  const AnalyticTruth t(Scenario::C1, laplace_for(0.85));
  const double total = oracle::simpson(
      [&](double x) { return oracle::simpson([&](double y) { return t.p(x, y); }, -40.0, 20.0, 2400); },
      -2.0, 2.0, 200);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));

  // f_WY: the kinks at w = +-2 sit on panel edges of the outer rule.
  auto inner = [&](double w) { return oracle::simpson([&](double y) { return t.f_wy(w, y); }, -40.0, 20.0, 400); };
  const double fwy = oracle::simpson(inner, -8.0, -2.0, 60) + oracle::simpson(inner, -2.0, 2.0, 60) +
                     oracle::simpson(inner, 2.0, 8.0, 60);
  CHECK(std::abs(fwy - 1.0) < 1e-4);

  // Without error f_WY is the joint density itself.
  const AnalyticTruth exact(Scenario::C1, ErrorModel::none());
  CHECK(exact.f_wy(0.4, 0.2) == doctest::Approx(exact.p(0.4, 0.2)).epsilon(1e-14));
  CHECK(t.f_x(0.0) == 0.25);
  CHECK(t.f_x_prime(0.3) == 0.0);
}

TEST_CASE("bias formulas") {
  const AnalyticTruth t(Scenario::C1, laplace_for(0.85));
  CHECK(bias_lc(t, 0.0, 0.0, 0.5) == 0.0);
  CHECK(bias_ll(t, 0.0, 0.0, 0.5) == 0.0);
  for (double x : {-1.0, 0.5}) {
    const double b = bias_lc(t, 0.2, 0.3, x);
    CHECK(bias_lc(t, 0.4, 0.6, x) == doctest::Approx(4.0 * b).epsilon(1e-12));
    // f_X uniform, f_X' = 0
    CHECK(bias_ll(t, 0.2, 0.3, x) == doctest::Approx(b / 0.25).epsilon(1e-12));
    CHECK(bias_lc(t, Bandwidths(0.2, 0.3), x) == b);
  }
  CHECK_THROWS_AS(bias_ll(t, 0.2, 0.3, 2.5), DomainError);
  CHECK_THROWS_AS(bias_lc(AnalyticTruth(Scenario::C2, laplace_for(0.85)), 0.2, 0.3, 0.0), DomainError);
}

TEST_CASE("bias formula is the small-bandwidth limit of the exact bias") {
  const AnalyticTruth t(Scenario::C1, laplace_for(0.85));
  const double x = 0.5, ym = t.mode(x);
  double last = INFINITY;
  for (double h : {0.02, 0.01, 0.005}) {
    const double rel = std::abs(population_dy(Scenario::C1, x, ym, h, h) / bias_lc(t, h, h, x) - 1.0);
    MESSAGE("h = " << h << ": relative gap " << rel);
    CHECK(rel < last);
    last = rel;
  }
  CHECK(last < 0.02);
}

TEST_CASE("estimator mean matches the exact bias") {
  // At h = (0.3, 0.3) the O(h^2) term is far from dominant (K1 has standard
  // deviation 0.73 there against the mode's slope of 2), so the estimator is
  // compared with the exact expectation rather than the leading term.
  const AnalyticTruth t(Scenario::C1, laplace_for(0.85));
  const double x = 0.5, ym = t.mode(x);
  const int reps = 2000;
  const auto m = mc_dy(0.85, {0.3, 0.3}, reps, 2000, x, ym);
  const double exact = population_dy(Scenario::C1, x, ym, 0.3, 0.3);
  const double se = std::sqrt(m.var / reps);
  MESSAGE("MC mean " << m.mean << " +- " << se << ", exact " << exact << ", leading term "
                     << bias_lc(t, 0.3, 0.3, x));
  CHECK(std::abs(m.mean - exact) < 4.0 * se);
}

TEST_CASE("variance formulas") {
  const AnalyticTruth t(Scenario::C1, laplace_for(0.75));
  const double v = variance_lc_ordinary(t, 0.2, 0.3, 1000, 0.5);
  CHECK(v > 0.0);
  CHECK(variance_lc_ordinary(t, 0.2, 0.3, 2000, 0.5) == doctest::Approx(v / 2).epsilon(1e-12));
  CHECK(variance_lc_ordinary(t, 0.1, 0.3, 1000, 0.5) == doctest::Approx(32 * v).epsilon(1e-12));
  CHECK(variance_ll_ordinary(t, {0.2, 0.3}, 1000, 0.5) == doctest::Approx(v / 0.0625).epsilon(1e-12));
  // eta0 f_WY / (4 sqrt(pi) c^2 n h1^5 h2^3), c = 2 / sigma^2
  const double c = 2.0 / (t.model().sigma_u() * t.model().sigma_u());
  const double by_hand = eta0(2) * t.f_wy(0.5, t.mode(0.5)) /
                         (4 * std::sqrt(oracle::kPi) * c * c * 1000 * std::pow(0.2, 5) * 0.027);
  CHECK(v == doctest::Approx(by_hand).epsilon(1e-10));
  CHECK_THROWS_AS(variance_lc_ordinary(AnalyticTruth(Scenario::C1, ErrorModel::none()), 0.2, 0.3, 1000, 0.5),
                  DomainError);
  CHECK_THROWS_AS(variance_lc_ordinary(AnalyticTruth(Scenario::C1, ErrorModel::gaussian(0.3)), 0.2, 0.3, 1000, 0.5),
                  DomainError);
}

TEST_CASE("variance formula against Monte Carlo") {
  // The ordinary smooth rate needs h1 small against sigma_u (0.67 here):
  // 1/phi_U(s/h1) = 1 + sigma^2 s^2 / (2 h1^2) must be dominated by its
  // second term.
  const AnalyticTruth t(Scenario::C1, laplace_for(0.75));
  const double x = 0.5, ym = t.mode(x);
  const auto m = mc_dy(0.75, {0.05, 0.4}, 2000, 2000, x, ym);
  const double f = variance_lc_ordinary(t, 0.05, 0.4, 2000, x);
  MESSAGE("MC variance " << m.var << ", formula " << f);
  CHECK(std::abs(m.var / f - 1.0) < 0.4);
}

TEST_CASE("optimal bandwidths") {
  const AnalyticTruth t(Scenario::C1, laplace_for(0.85));
  const auto ob = optimal_bandwidths_ordinary(t, 500);
  CHECK(ob.h1 > 0);
  CHECK(ob.h2 > 0);
  CHECK(ob.r1 > 0);
  CHECK(ob.r2 > 0);
  CHECK(ob.I[1] > 0);
  CHECK(ob.I[2] > 0);
  CHECK(ob.I[3] > 0);
  CHECK(ob.h1 == doctest::Approx(ob.r1 * ob.h2).epsilon(1e-14));
  CHECK(ob.h2 == doctest::Approx(ob.r2 * std::pow(500.0, -1.0 / 12.0)).epsilon(1e-14));

  const auto big = optimal_bandwidths_ordinary(t, 500.0 * 4096);
  CHECK(ob.h2 / big.h2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ob.h1 / big.h1 == doctest::Approx(2.0).epsilon(1e-12));

  // The I-integral form and the directly integrated surface agree.
  const auto s = laplace_for(0.85).smoothness();
  const double direct = mise_lc_ordinary(t, ob.h1, ob.h2, 500);
  CHECK(amise_from_integrals(ob, ob.h1, ob.h2, 500, 2, s.constant) == doctest::Approx(direct).epsilon(1e-5));

  // and the closed form minimizes it on a 15 x 15 neighbourhood
  double best = INFINITY;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) {
      const double h1 = ob.h1 * std::pow(2.0, -1.0 + i / 7.0), h2 = ob.h2 * std::pow(2.0, -1.0 + j / 7.0);
      best = std::min(best, amise_from_integrals(ob, h1, h2, 500, 2, s.constant));
    }
  CHECK(amise_from_integrals(ob, ob.h1, ob.h2, 500, 2, s.constant) <= 1.1 * best);
  CHECK(amise_from_integrals(ob, ob.h1, ob.h2, 500, 2, s.constant) <= best * (1 + 1e-9));

  CHECK_THROWS_AS(optimal_bandwidths_ordinary(t, 500, 2, -1.0), DomainError);
  CHECK_THROWS_AS(optimal_bandwidths_ordinary(AnalyticTruth(Scenario::C1, ErrorModel::gaussian(0.3)), 500),
                  DomainError);

  std::ostringstream os;
  write_csv(os, ob);
  CHECK(os.str().rfind("r1,r2,h1,h2,I1,I2,I3,I4\n", 0) == 0);
}

TEST_CASE("rate calculators") {
  CHECK(mise_rate_ordinary(1.0, 1.0, 1.0, 2) == doctest::Approx(5.0));
  CHECK(mise_rate_ordinary(0.5, 0.5, 100.0, 2) ==
        doctest::Approx(0.25 + 1.0 / (100.0 * std::pow(0.5, 5) * 0.125)));
  CHECK(mise_rate_super(1.0, 1.0, 1.0, 2, 0.0, 2.0) == doctest::Approx(4.0 + std::exp(1.0)));
  CHECK(super_smooth_h2(0.25, 2) == doctest::Approx(0.0625));
}

}  // TEST_SUITE
