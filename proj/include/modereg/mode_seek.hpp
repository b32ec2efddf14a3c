#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "modereg/density_est.hpp"

namespace modereg {

//! Data-dependent starting values: N percentiles of the responses whose
//! covariate lies within a window around x, equally spaced between the
//! `low` and `high` percentiles.
struct StartRule {
  int n_starts = 4;
  //! Fixed half-width e; when empty the window adapts to hold min_points.
  std::optional<double> window;
  int min_points = 30;
  double low = 10.0;
  double high = 90.0;
};

struct SeekOptions {
  Estimator estimator = Estimator::LocalConstant;
  int max_iter = 500;
  //! Stopping step; <= 0 means 1e-8 * sd(Y).
  double tol_step = 0.0;
  //! Merge distance for converged endpoints; <= 0 means 1e-3 * range(Y).
  double dedup_tol = 0.0;
  StartRule starts{};
};

//! Options with the data-relative defaults filled in.
SeekOptions resolve_options(const SeekOptions& opts, const Dataset& data);

enum class SeekStatus { Converged, MaxIter, DenominatorCollapse };

struct SeekResult {
  double y = 0.0;
  bool converged = false;
  int iters = 0;
  SeekStatus status = SeekStatus::MaxIter;
};

struct ModeDiagnostic {
  int iters = 0;
  double grad = 0.0;        // |dg/dy| at the mode
  double grad_scale = 0.0;  // magnitude scale of dg/dy (see FitProfile)
  double curvature = 0.0;   // d2g/dy2 at the mode
};

//! Estimated mode set at one covariate value.
struct ModeSet {
  double x = 0.0;
  std::vector<double> modes;               // strictly increasing
  std::vector<ModeDiagnostic> diagnostics;  // parallel to modes
  int n_starts = 0;
  int n_converged = 0;
  int n_rejected = 0;  // converged but not a maximum (d2g/dy2 >= 0)
  std::string note;    // why the set is empty, if it is

  bool empty() const noexcept { return modes.empty(); }
};

struct GridSpec {
  double lo;
  double hi;
  double delta;

  //! floor((hi - lo)/delta) + 1 points lo + k delta.
  std::vector<double> points() const;
};

struct ModeCurves {
  std::vector<double> grid;
  std::vector<ModeSet> sets;
  double delta = 0.0;
};

//! Starting values at x. Throws InsufficientDataError when fewer than two
//! responses fall in the window.
std::vector<double> starting_values(const Dataset& data, double x, const StartRule& rule);

//! Mean-shift iteration y <- sum c_j K2(t_j) Y_j / sum c_j K2(t_j) on a local
//! fit, stopping when the step falls below tol_step.
SeekResult mean_shift(const LocalFit& fit, std::span<const double> y, double h2,
                      double y0, int max_iter, double tol_step);

//! Local constant (joint density) mean shift at x from y0.
SeekResult mean_shift_lc(const Dataset& data, const Bandwidths& bw,
                         const ErrorModel& model, double x, double y0,
                         const SeekOptions& opts = {});
//! Local linear (conditional density) mean shift at x from y0.
SeekResult mean_shift_ll(const Dataset& data, const Bandwidths& bw,
                         const ErrorModel& model, double x, double y0,
                         const SeekOptions& opts = {});

//! Runs the mean shift from every start on a prepared local fit, keeps
//! converged maxima and merges endpoints closer than dedup_tol. `opts` must
//! be resolved.
ModeSet seek_modes(const LocalFit& fit, std::span<const double> y, double h2,
                   std::span<const double> starts, const SeekOptions& opts);

//! Provides starting values for a covariate value.
using StartProvider = std::function<std::vector<double>(double x)>;

ModeSet estimate_mode_set(const Dataset& data, const Bandwidths& bw,
                          const ErrorModel& model, double x, const SeekOptions& opts);
ModeSet estimate_mode_set(const Dataset& data, const Bandwidths& bw,
                          const ErrorModel& model, double x, const SeekOptions& opts,
                          const StartProvider& starts);

//! Mode sets over a covariate grid. A point that fails (no local data,
//! singular design) carries an empty set with a note; the sweep continues.
//! Kernels are tabulated.
ModeCurves mode_curves(const Dataset& data, const Bandwidths& bw,
                       const ErrorModel& model, const GridSpec& grid,
                       const SeekOptions& opts);
ModeCurves mode_curves(const Dataset& data, const Bandwidths& bw,
                       const ErrorModel& model, const GridSpec& grid,
                       const SeekOptions& opts, const StartProvider& starts);

//! Largest |W_j - x| / h1 over the data and x in [lo, hi].
double max_kernel_argument(const Dataset& data, double lo, double hi, double h1);

}  // namespace modereg
