#pragma once

#include <vector>

#include "modereg/dataset.hpp"
#include "modereg/deconv_kernel.hpp"
#include "modereg/error_model.hpp"

namespace modereg {

//! Which conditional-mode estimator a computation belongs to. Naive is the
//! local constant estimator run with the error ignored (phi_U = 1, W used as
//! if it were X).
enum class Estimator { Naive, LocalConstant, LocalLinear };

std::string_view to_string(Estimator e) noexcept;
Estimator parse_estimator(std::string_view name);

//! Error model an estimator actually uses: NoError for Naive.
ErrorModel effective_model(Estimator e, const ErrorModel& model) noexcept;

// Each estimator below comes in two forms: one taking the error model (kernel
// values by direct quadrature) and one taking prebuilt kernels for bw.h1.

//! Joint density estimate (1/(n h1 h2)) sum K_{U,0}((W_j-x)/h1) K2((Y_j-y)/h2).
//! Signed; never clipped.
double joint_density(const Dataset& data, const Bandwidths& bw,
                     const ErrorModel& model, double x, double y);
double joint_density(const Dataset& data, const Bandwidths& bw,
                     const DeconvKernels& kernels, double x, double y);

//! Partial derivative of joint_density in y.
double joint_density_dy(const Dataset& data, const Bandwidths& bw,
                        const ErrorModel& model, double x, double y);
double joint_density_dy(const Dataset& data, const Bandwidths& bw,
                        const DeconvKernels& kernels, double x, double y);

//! Deconvoluting density estimate of f_X at x.
double fx_deconv(const Dataset& data, double h1, const ErrorModel& model, double x);
double fx_deconv(const Dataset& data, const DeconvKernels& kernels, double x);

//! S_hat_{n,l}(x) = (1/(n h1)) sum K_{U,l}((W_j - x)/h1), l = 0, 1, 2.
double s_hat(const Dataset& data, double h1, const ErrorModel& model, double x, int ell);
double s_hat(const Dataset& data, const DeconvKernels& kernels, double x, int ell);

//! T_hat_{n,l}(x, y) for l = 0, 1, or its y-derivative when `deriv`.
double t_hat(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
             double x, double y, int ell, bool deriv);
double t_hat(const Dataset& data, const Bandwidths& bw, const DeconvKernels& kernels,
             double x, double y, int ell, bool deriv);

//! Local linear conditional density e1' S^-1 T (or its y-derivative).
//! Throws SingularDesignError when |det S| is negligible.
double cond_density_ll(const Dataset& data, const Bandwidths& bw,
                       const ErrorModel& model, double x, double y, bool deriv);
double cond_density_ll(const Dataset& data, const Bandwidths& bw,
                       const DeconvKernels& kernels, double x, double y, bool deriv);

//! Any of the estimators above, frozen at one covariate value x, written as
//!   g(y) = sum_j coef_j * K2((Y_j - y)/h2) / h2.
//! For LocalConstant/Naive g is the joint density p(x, y); for LocalLinear it
//! is the conditional density p(y | x). The mean-shift weights are
//! proportional to coef_j.
struct LocalFit {
  double x = 0.0;
  std::vector<double> coef;
  //! LocalLinear only: S0, S1, S2 and det = S0 S2 - S1^2.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, det = 0.0;
};

//! kernels.h1() is the covariate bandwidth. Throws SingularDesignError for a
//! LocalLinear fit with a singular local design.
LocalFit local_fit(const Dataset& data, const DeconvKernels& kernels,
                   Estimator estimator, double x);

//! g, dg/dy and d2g/dy2 of a local fit at y, plus the magnitude scale
//! sum_j |coef_j K2(t_j)| / h2^2 against which dg/dy is judged. A mean-shift
//! step is h2^2 g_y / g, so a converged trajectory has |g_y| / dy_scale
//! below step / h2. (Weighting by |t_j| instead ignores a point sitting
//! exactly at y, which is where a lone outlier's mode ends up.)
struct FitProfile {
  double value;
  double dy;
  double dyy;
  double dy_scale;
};
FitProfile evaluate(const LocalFit& fit, std::span<const double> y, double h2,
                    double y0);

//! Relative threshold below which |det S_hat| counts as singular.
inline constexpr double kSingularDet = 1e-12;

}  // namespace modereg
