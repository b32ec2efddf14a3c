#include "modereg/mode_seek.hpp"

#include <algorithm>
#include <cmath>

#include "modereg/errors.hpp"
#include "modereg/kernel_sums.hpp"

namespace modereg {

std::vector<double> GridSpec::points() const {
  if (!(hi > lo) || !(delta > 0.0)) throw DomainError("grid needs lo < hi and delta > 0");
  // tolerate representation error in (hi - lo)/delta
  const auto m = static_cast<std::size_t>(std::floor((hi - lo) / delta + 1e-9));
  std::vector<double> out(m + 1);
  for (std::size_t k = 0; k <= m; ++k) out[k] = lo + static_cast<double>(k) * delta;
  return out;
}

SeekOptions resolve_options(const SeekOptions& opts, const Dataset& data) {
  if (opts.max_iter < 1) throw DomainError("max_iter must be at least 1");
  if (opts.starts.n_starts < 1) throw DomainError("need at least one starting value");
  SeekOptions out = opts;
  const auto y = data.y();
  if (!(out.tol_step > 0.0)) {
    const double sd = sample_sd(y);
    out.tol_step = 1e-8 * (sd > 0.0 ? sd : 1.0);
  }
  if (!(out.dedup_tol > 0.0)) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double range = *hi - *lo;
    out.dedup_tol = 1e-3 * (range > 0.0 ? range : 1.0);
  }
  return out;
}

std::vector<double> starting_values(const Dataset& data, double x, const StartRule& rule) {
  if (rule.n_starts < 1) throw DomainError("need at least one starting value");
  const auto w = data.w();
  const auto y = data.y();
  std::vector<double> local;
  if (rule.window) {
    for (std::size_t j = 0; j < w.size(); ++j)
      if (std::abs(w[j] - x) < *rule.window) local.push_back(y[j]);
  } else {
    std::vector<double> dist(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) dist[j] = std::abs(w[j] - x);
    const std::size_t m = std::min<std::size_t>(std::max(rule.min_points, 2), w.size());
    auto sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(m - 1), sorted.end());
    // smallest window holding m points: everything within the m-th distance
    const double e = sorted[m - 1];
    for (std::size_t j = 0; j < w.size(); ++j)
      if (dist[j] <= e) local.push_back(y[j]);
  }
  if (local.size() < 2)
    throw InsufficientDataError("fewer than two observations near x = " + std::to_string(x));

  std::sort(local.begin(), local.end());
  std::vector<double> out;
  const int n = rule.n_starts;
  for (int i = 0; i < n; ++i) {
    const double pct = n == 1 ? 0.5 * (rule.low + rule.high)
                              : rule.low + (rule.high - rule.low) * i / (n - 1);
    out.push_back(quantile(local, pct / 100.0));
  }
  return out;
}

SeekResult mean_shift(const LocalFit& fit, std::span<const double> y, double h2,
                      double y0, int max_iter, double tol_step) {
  SeekResult r;
  r.y = y0;
  const double inv_h2 = 1.0 / h2;
  for (int k = 1; k <= max_iter; ++k) {
    const auto s = sums::shift(fit.coef, y, r.y, inv_h2);
    r.iters = k;
    if (!(std::abs(s.den) > 1e-12 * s.max_abs)) {
      r.status = SeekStatus::DenominatorCollapse;
      return r;
    }
    const double next = s.num / s.den;
    if (!std::isfinite(next)) {
      r.status = SeekStatus::DenominatorCollapse;
      return r;
    }
    const double step = std::abs(next - r.y);
    r.y = next;
    if (step < tol_step) {
      r.converged = true;
      r.status = SeekStatus::Converged;
      return r;
    }
  }
  r.status = SeekStatus::MaxIter;
  return r;
}

namespace {

SeekResult shift_at(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
                    Estimator est, double x, double y0, const SeekOptions& opts) {
  const auto o = resolve_options(opts, data);
  const auto kernels = DeconvKernels::exact(model, bw.h1);
  const auto fit = local_fit(data, kernels, est, x);
  return mean_shift(fit, data.y(), bw.h2, y0, o.max_iter, o.tol_step);
}

DeconvKernels kernels_for(const Dataset& data, const ErrorModel& model, double h1,
                          double lo, double hi) {
  return DeconvKernels::tabulated(model, h1, max_kernel_argument(data, lo, hi, h1));
}

ModeSet mode_set_at(const Dataset& data, const DeconvKernels& kernels, double h2, double x,
                    const SeekOptions& o, const StartProvider* provider) {
  ModeSet set;
  set.x = x;
  std::vector<double> starts;
  try {
    starts = provider ? (*provider)(x) : starting_values(data, x, o.starts);
  } catch (const InsufficientDataError& e) {
    set.note = e.what();
    return set;
  }
  try {
    const auto fit = local_fit(data, kernels, o.estimator, x);
    return seek_modes(fit, data.y(), h2, starts, o);
  } catch (const SingularDesignError& e) {
    set.n_starts = static_cast<int>(starts.size());
    set.note = e.what();
    return set;
  }
}

}  // namespace

double max_kernel_argument(const Dataset& data, double lo, double hi, double h1) {
  const auto w = data.w();
  const auto [wlo, whi] = std::minmax_element(w.begin(), w.end());
  return std::max(std::abs(*whi - lo), std::abs(*wlo - hi)) / h1;
}

SeekResult mean_shift_lc(const Dataset& data, const Bandwidths& bw,
                         const ErrorModel& model, double x, double y0,
                         const SeekOptions& opts) {
  return shift_at(data, bw, model, Estimator::LocalConstant, x, y0, opts);
}

SeekResult mean_shift_ll(const Dataset& data, const Bandwidths& bw,
                         const ErrorModel& model, double x, double y0,
                         const SeekOptions& opts) {
  return shift_at(data, bw, model, Estimator::LocalLinear, x, y0, opts);
}

ModeSet seek_modes(const LocalFit& fit, std::span<const double> y, double h2,
                   std::span<const double> starts, const SeekOptions& opts) {
  ModeSet set;
  set.x = fit.x;
  set.n_starts = static_cast<int>(starts.size());
  struct Candidate {
    double y;
    ModeDiagnostic diag;
  };
  std::vector<Candidate> found;
  for (double y0 : starts) {
    const auto r = mean_shift(fit, y, h2, y0, opts.max_iter, opts.tol_step);
    if (!r.converged) continue;
    ++set.n_converged;
    const auto p = evaluate(fit, y, h2, r.y);
    if (!(p.dyy < 0.0)) {
      ++set.n_rejected;
      continue;
    }
    found.push_back({r.y, {r.iters, std::abs(p.dy), p.dy_scale, p.dyy}});
  }
  std::sort(found.begin(), found.end(),
            [](const Candidate& a, const Candidate& b) { return a.y < b.y; });
  for (std::size_t i = 0; i < found.size();) {
    set.modes.push_back(found[i].y);
    set.diagnostics.push_back(found[i].diag);
    std::size_t k = i + 1;
    while (k < found.size() && found[k].y - found[k - 1].y <= opts.dedup_tol) ++k;
    i = k;
  }
  if (set.modes.empty()) {
    if (set.n_converged == 0)
      set.note = "no trajectory converged";
    else
      set.note = "no converged point is a local maximum";
  }
  return set;
}

ModeSet estimate_mode_set(const Dataset& data, const Bandwidths& bw,
                          const ErrorModel& model, double x, const SeekOptions& opts) {
  const auto o = resolve_options(opts, data);
  const auto kernels = kernels_for(data, effective_model(o.estimator, model), bw.h1, x, x);
  return mode_set_at(data, kernels, bw.h2, x, o, nullptr);
}

ModeSet estimate_mode_set(const Dataset& data, const Bandwidths& bw,
                          const ErrorModel& model, double x, const SeekOptions& opts,
                          const StartProvider& starts) {
  const auto o = resolve_options(opts, data);
  const auto kernels = kernels_for(data, effective_model(o.estimator, model), bw.h1, x, x);
  return mode_set_at(data, kernels, bw.h2, x, o, &starts);
}

namespace {

ModeCurves curves_impl(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
                       const GridSpec& grid, const SeekOptions& opts,
                       const StartProvider* provider) {
  const auto o = resolve_options(opts, data);
  ModeCurves out;
  out.grid = grid.points();
  out.delta = grid.delta;
  const auto kernels = kernels_for(data, effective_model(o.estimator, model), bw.h1,
                                   out.grid.front(), out.grid.back());
  out.sets.reserve(out.grid.size());
  for (double x : out.grid) out.sets.push_back(mode_set_at(data, kernels, bw.h2, x, o, provider));
  return out;
}

}  // namespace

ModeCurves mode_curves(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
                       const GridSpec& grid, const SeekOptions& opts) {
  return curves_impl(data, bw, model, grid, opts, nullptr);
}

ModeCurves mode_curves(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
                       const GridSpec& grid, const SeekOptions& opts,
                       const StartProvider& starts) {
  return curves_impl(data, bw, model, grid, opts, &starts);
}

}  // namespace modereg
