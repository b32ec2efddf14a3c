#include "modereg/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "modereg/errors.hpp"
#include "modereg/kernel_sums.hpp"
#include "modereg/parallel.hpp"
#include "modereg/random.hpp"

namespace modereg {

double h2_normal_reference(std::span<const double> y) {
  if (y.size() < 2) throw DataError("normal reference rule needs at least two responses");
  const double s = sample_sd(y);
  if (!(s > 0.0)) throw DataError("responses have zero variance");
  return 1.06 * s * std::pow(static_cast<double>(y.size()), -0.2);
}

std::vector<double> default_h1_grid(std::span<const double> w, int count) {
  if (count < 1) throw DomainError("h1 grid needs at least one candidate");
  const double s = sample_sd(w);
  if (!(s > 0.0)) throw DataError("covariate has zero variance");
  // 0.05 to 2 sd(W) in normal-kernel units; K1 has variance mu2 = 6, so
  // its h1 is sqrt(6) times smaller for the same smoothing.
  const double unit = s / std::sqrt(6.0);
  const double lo = std::log(0.05 * unit), hi = std::log(2.0 * unit);
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    g[static_cast<std::size_t>(k)] =
        count == 1 ? std::exp(lo) : std::exp(lo + (hi - lo) * k / (count - 1));
  return g;
}

CvConfig resolve_cv_config(const CvConfig& cfg, const Dataset& data) {
  CvConfig out = cfg;
  if (out.h1_grid.empty()) out.h1_grid = default_h1_grid(data.w());
  for (std::size_t k = 0; k < out.h1_grid.size(); ++k) {
    if (!(out.h1_grid[k] > 0.0) || !std::isfinite(out.h1_grid[k]))
      throw ConfigError("h1_grid: candidates must be finite and positive");
    if (k > 0 && !(out.h1_grid[k] > out.h1_grid[k - 1]))
      throw ConfigError("h1_grid: candidates must be strictly increasing");
  }
  if (out.B < 1) throw ConfigError("B: must be at least 1");
  const auto& p = out.weight_percentiles;
  if (!(p[0] >= 0.0 && p[0] <= p[1] && p[1] <= 100.0))
    throw ConfigError("weight_percentiles: need 0 <= low <= high <= 100");
  return out;
}

std::array<double, 2> weight_bounds(std::span<const double> v,
                                    const std::array<double, 2>& percentiles) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return {quantile(s, percentiles[0] / 100.0), quantile(s, percentiles[1] / 100.0)};
}

namespace {

// Gaussian gram matrices of the responses: G for the squared-density term
// (bandwidth sqrt(2) h2) and H for the evaluation term (bandwidth h2).
struct Gram {
  Eigen::MatrixXd g, h;
};

Gram make_gram(std::span<const double> y, double h2) {
  Gram gr;
  const auto n = static_cast<Eigen::Index>(y.size());
  gr.g.resize(n, n);
  gr.h.resize(n, n);
  sums::gaussian_gram(y, std::sqrt(2.0) * h2, gr.g.data());
  sums::gaussian_gram(y, h2, gr.h.data());
  return gr;
}

DeconvKernels cv_kernels(std::span<const double> wfit, std::span<const double> v,
                         const ErrorModel& model, double h1) {
  const auto [flo, fhi] = std::minmax_element(wfit.begin(), wfit.end());
  const auto [vlo, vhi] = std::minmax_element(v.begin(), v.end());
  const double span = std::max(std::abs(*fhi - *vlo), std::abs(*vhi - *flo));
  return DeconvKernels::tabulated(model, h1, span / h1);
}

CvScore cv_core(std::span<const double> wfit, std::span<const double> v,
                const DeconvKernels& kernels, bool local_linear,
                const std::array<double, 2>& bounds, const Gram& gram) {
  const std::size_t n = wfit.size();
  const double inv_h1 = 1.0 / kernels.h1();
  CvScore out;

  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < n; ++j)
    if (v[j] >= bounds[0] && v[j] <= bounds[1]) rows.push_back(j);
  out.n_weighted = static_cast<int>(rows.size());

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(n));
  std::vector<char> used(rows.size(), 0);
  std::vector<double> k0(n), k1(n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t j = rows[r];
    const auto row = static_cast<Eigen::Index>(r);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, abs0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) {
        k0[i] = k1[i] = 0.0;
        continue;
      }
      const double t = (wfit[i] - v[j]) * inv_h1;
      k0[i] = kernels(0, t);
      s0 += k0[i];
      abs0 += std::abs(k0[i]);
      if (local_linear) {
        k1[i] = kernels(1, t);
        s1 += k1[i];
        s2 += kernels(2, t);
      }
    }
    if (!local_linear) {
      // p(y|x) = p(x, y) / f_X(x); the common 1/((n-1) h1) cancels
      if (!(std::abs(s0) > kSingularDet * abs0)) continue;
      for (std::size_t i = 0; i < n; ++i) c(row, static_cast<Eigen::Index>(i)) = k0[i] / s0;
    } else {
      const double det = s0 * s2 - s1 * s1;
      const double scale = std::max({std::abs(s0 * s2), s1 * s1, abs0 * abs0});
      if (!(std::abs(det) > kSingularDet * scale)) continue;
      const double a = s2 / det, b = s1 / det;
      for (std::size_t i = 0; i < n; ++i)
        c(row, static_cast<Eigen::Index>(i)) = a * k0[i] - b * k1[i];
    }
    used[r] = 1;
  }
  for (char u : used)
    if (!u) ++out.n_skipped;
  out.reliable = out.n_skipped <= 0.1 * out.n_weighted;

  const Eigen::MatrixXd cg = c * gram.g;
  double square = 0.0, cross = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!used[r]) continue;
    const auto row = static_cast<Eigen::Index>(r);
    const auto j = static_cast<Eigen::Index>(rows[r]);
    square += cg.row(row).dot(c.row(row));
    cross += c.row(row).dot(gram.h.row(j));
  }
  out.score = (square - 2.0 * cross) / static_cast<double>(n);
  return out;
}

void check_estimator_input(const Dataset& data, std::span<const double> v) {
  if (data.n() < 3) throw DataError("cross-validation needs at least three observations");
  if (v.size() != data.n()) throw DataError("evaluation covariate has the wrong length");
}

void check_h2(double h2) {
  if (!(h2 > 0.0) || !std::isfinite(h2)) throw DomainError("h2 must be finite and positive");
}

bool is_better(const CvScore& s, double best) {
  return s.reliable && s.score < best;
}

}  // namespace

CvScore cv_score(const Dataset& data, std::span<const double> v, const Bandwidths& bw,
                 const ErrorModel& model, Estimator estimator,
                 const std::array<double, 2>& bounds) {
  check_estimator_input(data, v);
  const auto m = effective_model(estimator, model);
  const auto kernels = cv_kernels(data.w(), v, m, bw.h1);
  return cv_core(data.w(), v, kernels, estimator == Estimator::LocalLinear, bounds,
                 make_gram(data.y(), bw.h2));
}

CvScore cv_score(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
                 Estimator estimator, const std::array<double, 2>& bounds) {
  return cv_score(data, data.w(), bw, model, estimator, bounds);
}

CvSelection minimize_cv_h1(const Dataset& data, const ErrorModel& model,
                           const CvConfig& cfg, double h2,
                           std::optional<std::span<const double>> v,
                           std::optional<std::array<double, 2>> bounds) {
  const auto c = resolve_cv_config(cfg, data);
  const auto vv = v ? *v : data.w();
  check_estimator_input(data, vv);
  check_h2(h2);
  const auto b = bounds ? *bounds : weight_bounds(vv, c.weight_percentiles);
  const auto m = effective_model(c.estimator, model);
  const bool ll = c.estimator == Estimator::LocalLinear;
  const auto gram = make_gram(data.y(), h2);

  CvSelection sel;
  sel.grid = c.h1_grid;
  sel.scores.resize(sel.grid.size());
  parallel_for(
      sel.grid.size(),
      [&](std::size_t k) {
        const auto kernels = cv_kernels(data.w(), vv, m, sel.grid[k]);
        sel.scores[k] = cv_core(data.w(), vv, kernels, ll, b, gram);
      },
      c.threads);

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t k = 0; k < sel.grid.size(); ++k) {
    if (is_better(sel.scores[k], best)) {
      best = sel.scores[k].score;
      sel.h1 = sel.grid[k];
      found = true;
    }
  }
  if (!found) {
    std::string msg = "every h1 candidate failed cross-validation:";
    for (std::size_t k = 0; k < sel.grid.size(); ++k)
      msg += " h1=" + std::to_string(sel.grid[k]) + " skipped " +
             std::to_string(sel.scores[k].n_skipped) + "/" +
             std::to_string(sel.scores[k].n_weighted) + ";";
    throw SelectionError(msg);
  }
  return sel;
}

double simex_extrapolate(double h1_star, double h1_star_star) {
  if (!(h1_star > 0.0) || !(h1_star_star > 0.0))
    throw DomainError("SIMEX bandwidths must be positive");
  return h1_star * h1_star / h1_star_star;
}

namespace {

// Averaged CV over the B contaminated covariate columns for every candidate.
// A candidate fails if it fails for any b.
double simex_level(const std::vector<std::vector<double>>& fit_cols,
                   const std::vector<std::span<const double>>& eval_cols,
                   const ErrorModel& model, const CvConfig& c, const Gram& gram, int step,
                   std::vector<double>& means, std::vector<SimexTraceRow>& rows) {
  const std::size_t B = fit_cols.size(), K = c.h1_grid.size();
  const bool ll = c.estimator == Estimator::LocalLinear;
  std::vector<CvScore> scores(B * K);
  parallel_for(
      B * K,
      [&](std::size_t idx) {
        const std::size_t k = idx / B, b = idx % B;
        const std::span<const double> w = fit_cols[b];
        const auto bounds = weight_bounds(eval_cols[b], c.weight_percentiles);
        const auto kernels = cv_kernels(w, eval_cols[b], model, c.h1_grid[k]);
        scores[idx] = cv_core(w, eval_cols[b], kernels, ll, bounds, gram);
      },
      c.threads);

  means.assign(K, std::numeric_limits<double>::quiet_NaN());
  double best = std::numeric_limits<double>::infinity(), best_h1 = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    bool ok = true;
    double sum = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const auto& s = scores[k * B + b];
      rows.push_back({step, static_cast<int>(b + 1), c.h1_grid[k],
                      s.reliable ? s.score : std::numeric_limits<double>::quiet_NaN()});
      ok = ok && s.reliable;
      sum += s.score;
    }
    if (!ok) continue;
    means[k] = sum / static_cast<double>(B);
    if (means[k] < best) {
      best = means[k];
      best_h1 = c.h1_grid[k];
    }
  }
  if (!(best_h1 > 0.0))
    throw SelectionError("CV-SIMEX step " + std::to_string(step) +
                         ": every h1 candidate failed for some replicate");
  return best_h1;
}

}  // namespace

SimexResult cv_simex_h1(const Dataset& data, const ErrorModel& model, const CvConfig& cfg,
                        double h2) {
  if (model.kind() == ErrorKind::NoError)
    throw DomainError("CV-SIMEX needs an error model with positive variance");
  if (cfg.estimator == Estimator::Naive)
    throw DomainError("CV-SIMEX applies to the local constant and local linear estimators");
  const auto c = resolve_cv_config(cfg, data);
  if (data.n() < 3) throw DataError("cross-validation needs at least three observations");
  check_h2(h2);
  const std::size_t n = data.n(), B = static_cast<std::size_t>(c.B);
  const auto w = data.w();

  // All error draws up front so the schedule cannot change them.
  std::vector<std::vector<double>> w1(B), w2(B);
  for (std::size_t b = 0; b < B; ++b) {
    const auto u1 = sample_errors(model, n, derive_seed(c.seed, {1, b}));
    const auto u2 = sample_errors(model, n, derive_seed(c.seed, {2, b}));
    w1[b].resize(n);
    w2[b].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      w1[b][i] = w[i] + u1[i];
      w2[b][i] = w1[b][i] + u2[i];
    }
  }
  const auto gram = make_gram(data.y(), h2);

  SimexResult res;
  res.trace.grid = c.h1_grid;
  std::vector<std::span<const double>> eval_w(B, w), eval_w1;
  for (const auto& col : w1) eval_w1.emplace_back(col);
  res.trace.h1_star = simex_level(w1, eval_w, model, c, gram, 2, res.trace.mean_star,
                                  res.trace.rows);
  res.trace.h1_star_star = simex_level(w2, eval_w1, model, c, gram, 4,
                                 res.trace.mean_star_star, res.trace.rows);
  res.h1 = simex_extrapolate(res.trace.h1_star, res.trace.h1_star_star);
  return res;
}

void write_csv(std::ostream& os, const SimexTrace& trace) {
  os << "step,b,h1_candidate,score\n";
  os.precision(17);
  for (const auto& r : trace.rows)
    os << r.step << ',' << r.b << ',' << r.h1_candidate << ',' << r.score << '\n';
}

}  // namespace modereg
