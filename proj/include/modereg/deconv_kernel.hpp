#pragma once

#include <array>
#include <memory>
#include <vector>

#include "modereg/error_model.hpp"

namespace modereg {

//! Fourier transform of K1, (1 - s^2)^3 on [-1, 1], and its first two
//! derivatives (deriv = 0, 1, 2). Zero outside [-1, 1].
double phi_k1(int deriv, double s) noexcept;

//! K1(t) = (1/2pi) int (1 - s^2)^3 cos(ts) ds.
double k1(double t);

//! Second derivative K1''(t).
double k1_dd(double t);

//! Standard normal density (deriv = 0) or its first/second derivative.
double k2(int deriv, double t) noexcept;

//! Generalized deconvoluting kernel
//!   K_{U,l}(t) = i^{-l} (1/2pi) int e^{-its} phi_K1^{(l)}(s) / phi_U(s/h1) ds
//! for l = 0, 1, 2, computed through its real cosine (l even) or sine (l = 1)
//! reduction by Gauss-Legendre quadrature.
double ku_ell(int ell, double t, double h1, const ErrorModel& model);

//! Fixed-node quadrature evaluator of K_{U,l} and dK_{U,l}/dt for one
//! (model, h1). Node factors phi_K1^{(l)}(s) / phi_U(s/h1) are precomputed.
class KernelQuadrature {
public:
  KernelQuadrature(const ErrorModel& model, double h1);

  double value(int ell, double t) const;
  double slope(int ell, double t) const;
  //! Value and slope in one pass.
  std::array<double, 2> value_and_slope(int ell, double t) const;
  //! Values and slopes at t0 + k step, k < count, using the same rules as
  //! value_and_slope but advancing cos/sin by rotation instead of calling
  //! them at every point.
  void sweep(int ell, double t0, double step, std::size_t count, double* values,
             double* slopes) const;

  const ErrorModel& model() const noexcept { return model_; }
  double h1() const noexcept { return h1_; }

private:
  struct Panelled {
    std::vector<double> s, factor;  // nodes on (0, 1], weight * phi^(l)/phi_U / pi
  };
  const Panelled& rule_for(int ell, double t) const;
  //! 0 for the base rule, else 1 + index of the composite tier.
  static int tier_for(double t) noexcept;
  const Panelled& rule(int ell, int tier) const;

  ErrorModel model_;
  double h1_;
  std::array<Panelled, 3> base_;         // 256-point symmetric rule
  // composite rules for large |t|: 4, 8, 16, 32 panels
  std::array<std::array<Panelled, 3>, 4> wide_;
};

//! Tabulated K_{U,l} on a uniform grid with cubic Hermite interpolation
//! (slopes from the same quadrature). Lookups outside the range fall back to
//! direct quadrature.
class KernelTable {
public:
  KernelTable(int ell, const KernelQuadrature& quad, double t_min, double t_max,
              std::size_t resolution);

  double operator()(double t) const;

  int ell() const noexcept { return ell_; }
  double h1() const noexcept { return quad_.h1(); }
  const ErrorModel& model() const noexcept { return quad_.model(); }
  double t_min() const noexcept { return t_min_; }
  double t_max() const noexcept { return t_max_; }
  std::size_t size() const noexcept { return values_.size(); }
  double node(std::size_t i) const noexcept { return t_min_ + step_ * static_cast<double>(i); }
  double value_at_node(std::size_t i) const noexcept { return values_[i]; }

private:
  int ell_;
  KernelQuadrature quad_;
  double t_min_, t_max_, step_, inv_step_;
  std::vector<double> values_, slopes_;
};

//! Builds a table of K_{U,l} over [range_lo, range_hi] with `resolution`
//! nodes (>= 2).
KernelTable build_table(int ell, double h1, const ErrorModel& model,
                        double range_lo = -40.0, double range_hi = 40.0,
                        std::size_t resolution = 16001);

//! The K_{U,0..2} family for one (model, h1), evaluated either exactly by
//! quadrature or through shared cached tables.
class DeconvKernels {
public:
  //! Quadrature on every call.
  static DeconvKernels exact(const ErrorModel& model, double h1);
  //! Tables covering |t| <= max(40, max_abs_t), spacing 0.005, shared
  //! process-wide through a cache.
  static DeconvKernels tabulated(const ErrorModel& model, double h1,
                                 double max_abs_t = 40.0);

  double operator()(int ell, double t) const {
    return tables_[ell] ? (*tables_[ell])(t) : quad_->value(ell, t);
  }

  const ErrorModel& model() const noexcept { return quad_->model(); }
  double h1() const noexcept { return quad_->h1(); }
  bool is_tabulated() const noexcept { return static_cast<bool>(tables_[0]); }

private:
  std::shared_ptr<const KernelQuadrature> quad_;
  std::array<std::shared_ptr<const KernelTable>, 3> tables_{};
};

}  // namespace modereg
