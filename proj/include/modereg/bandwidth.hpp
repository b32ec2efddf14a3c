#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "modereg/density_est.hpp"

namespace modereg {

//! 1.06 * sd(y) * n^(-1/5). Throws DataError for fewer than two values or
//! zero spread.
double h2_normal_reference(std::span<const double> y);

//! `count` log-spaced values from 0.05 sd(w) / sqrt(6) to 2 sd(w) / sqrt(6).
std::vector<double> default_h1_grid(std::span<const double> w, int count = 20);

struct CvConfig {
  //! Candidate h1 values; empty means default_h1_grid of the observed W.
  std::vector<double> h1_grid;
  int B = 15;
  std::array<double, 2> weight_percentiles{2.5, 97.5};
  Estimator estimator = Estimator::LocalConstant;
  std::uint64_t seed = 0;
  int threads = 0;
};

//! Validates the config and fills in the default grid.
CvConfig resolve_cv_config(const CvConfig& cfg, const Dataset& data);

//! Weight bounds [low, high] percentiles of v.
std::array<double, 2> weight_bounds(std::span<const double> v,
                                    const std::array<double, 2>& percentiles);

struct CvScore {
  double score = 0.0;
  int n_weighted = 0;  // j with V_j inside the weight bounds
  int n_skipped = 0;   // of those, dropped for a singular leave-one-out design
  //! False when more than 10% of the weighted points were skipped.
  bool reliable = true;
};

//! Leave-one-out CV criterion for the conditional density estimator:
//!   (1/n) sum_j w(V_j) int p_{-j}(y|V_j)^2 dy - (2/n) sum_j w(V_j) p_{-j}(Y_j|V_j)
//! The estimator is fitted on (data.w(), data.y()) and evaluated at the
//! covariate column v (same length). Naive is fitted with no error model.
CvScore cv_score(const Dataset& data, std::span<const double> v, const Bandwidths& bw,
                 const ErrorModel& model, Estimator estimator,
                 const std::array<double, 2>& bounds);

//! cv_score with v = data.w().
CvScore cv_score(const Dataset& data, const Bandwidths& bw, const ErrorModel& model,
                 Estimator estimator, const std::array<double, 2>& bounds);

struct CvSelection {
  double h1 = 0.0;
  std::vector<double> grid;
  std::vector<CvScore> scores;  // parallel to grid
};

//! Grid argmin of cv_score over cfg.h1_grid (ties go to the smaller h1).
//! `v` overrides the evaluation covariate and `bounds` the weight bounds
//! (default: percentiles of v). Unreliable candidates are not eligible;
//! throws SelectionError when none is.
CvSelection minimize_cv_h1(const Dataset& data, const ErrorModel& model,
                           const CvConfig& cfg, double h2,
                           std::optional<std::span<const double>> v = std::nullopt,
                           std::optional<std::array<double, 2>> bounds = std::nullopt);

struct SimexTraceRow {
  int step;  // 2 (W* fitted, evaluated at W) or 4 (W** fitted, evaluated at W*)
  int b;     // 1..B
  double h1_candidate;
  double score;  // NaN when the candidate failed for this b
};

struct SimexTrace {
  double h1_star = 0.0;
  double h1_star_star = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_star;       // averaged step 2 scores per candidate
  std::vector<double> mean_star_star;  // averaged step 4 scores per candidate
  std::vector<SimexTraceRow> rows;
};

void write_csv(std::ostream& os, const SimexTrace& trace);

struct SimexResult {
  double h1 = 0.0;
  SimexTrace trace;
};

//! CV-SIMEX choice of h1 with h2 held fixed. The estimator must be
//! LocalConstant or LocalLinear and the model must carry error.
SimexResult cv_simex_h1(const Dataset& data, const ErrorModel& model, const CvConfig& cfg,
                        double h2);

//! h1_star^2 / h1_star_star.
double simex_extrapolate(double h1_star, double h1_star_star);

}  // namespace modereg
