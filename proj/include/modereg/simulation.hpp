#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "modereg/bandwidth.hpp"
#include "modereg/metrics.hpp"
#include "modereg/mode_seek.hpp"

namespace modereg {

enum class Scenario { C1, C2 };

std::string_view to_string(Scenario s) noexcept;
Scenario parse_scenario(std::string_view name);

//! Y | X = x is a two-component normal mixture; both scenarios use equal
//! weights 1/2. Templated on the scalar so the theory module can push
//! truncated Taylor series through it.
template <class T>
struct MixtureAt {
  std::array<T, 2> mean;
  std::array<T, 2> sd;
};

template <class T>
MixtureAt<T> scenario_mixture(Scenario s, const T& x) {
  using std::exp;
  const T m = x + x * x;
  if (s == Scenario::C1) {
    const T sigma = exp(-(x * x)) + 0.5;
    return {{m - 2.0 * sigma, m}, {2.5 * sigma, 0.5 * sigma}};
  }
  return {{m, m - 6.0}, {T(0.5), T(0.5)}};
}

//! Conditional density p(y | x).
template <class T>
T conditional_density(Scenario s, const T& x, const T& y) {
  using std::exp;
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  const auto mix = scenario_mixture(s, x);
  T out(0.0);
  for (int k = 0; k < 2; ++k) {
    const T z = (y - mix.mean[k]) / mix.sd[k];
    out = out + (0.5 * kInvSqrt2Pi) * exp(-0.5 * (z * z)) / mix.sd[k];
  }
  return out;
}

//! X ~ Uniform(-2, 2).
inline constexpr double kXLow = -2.0, kXHigh = 2.0;
inline constexpr double kVarX = 4.0 / 3.0;
double fx_true(double x) noexcept;

//! p(y|x) and its first two y-derivatives.
struct DensityY {
  double p, py, pyy;
};
DensityY conditional_density_y(Scenario s, double x, double y);

//! The approximate mode curve(s) of each scenario: m(x) for C1,
//! {m(x), m(x) - 6} for C2, m(x) = x + x^2.
std::vector<double> nominal_modes(Scenario s, double x);

//! m(x) +- 0.5 around each nominal mode.
struct FixedTruthOffsets {
  std::vector<double> offsets{-0.5, 0.5};
};

struct OracleGrids {
  std::vector<double> h1_grid;  // empty: default_oracle_h1_grid()
  std::vector<double> h2_grid;  // empty: default_oracle_h2_grid()
};

struct SimexSelection {
  CvConfig cv{};  // estimator and seed are set per replicate
};

struct SimConfig {
  Scenario scenario = Scenario::C1;
  std::size_t n = 500;
  double lambda = 0.85;
  int n_replicates = 50;
  std::uint64_t seed = 1;
  ErrorKind error_kind = ErrorKind::Laplace;
  GridSpec grid{-2.0, 2.0, 0.1};
  std::variant<StartRule, FixedTruthOffsets> start_rule = StartRule{};
  std::vector<Estimator> estimators{Estimator::Naive, Estimator::LocalConstant,
                                    Estimator::LocalLinear};
  std::variant<OracleGrids, SimexSelection> bandwidth_mode = OracleGrids{};
  int max_iter = 500;
  int threads = 0;
};

//! Validates and fills defaults (oracle grids). Throws ConfigError naming
//! the first bad field.
SimConfig resolve_sim_config(const SimConfig& cfg);

//! `count` log-spaced values from lo to hi.
std::vector<double> log_spaced(double lo, double hi, int count);
//! 14 log-spaced values in [0.04, 1.2].
std::vector<double> default_oracle_h1_grid();
//! 14 log-spaced values in [0.08, 4].
std::vector<double> default_oracle_h2_grid();

//! Error model implied by the config's reliability ratio.
ErrorModel sim_error_model(const SimConfig& cfg);

struct SimulatedData {
  Dataset data;
  std::vector<double> hidden_x;  // diagnostics only
};

//! Deterministic in (cfg.seed, replicate).
SimulatedData generate_dataset(const SimConfig& cfg, int replicate);

//! Exact mode set of p(.|x): sign changes of p_y on a dense y-grid refined
//! by bracketing root-finding, keeping maxima.
ModeSet true_mode_set(Scenario s, double x);
ModeSet true_mode_set(const SimConfig& cfg, double x);
ModeCurves true_mode_curves(Scenario s, const GridSpec& grid);

//! Start values for a covariate value under a fixed-offset rule.
std::vector<double> truth_offset_starts(Scenario s, const FixedTruthOffsets& rule, double x);

struct OracleResult {
  Bandwidths bw{1.0, 1.0};
  ModeCurves curves;
  IseReport report;
};

//! Exhaustive search of the oracle grids for the bandwidth pair whose mode
//! curves have the smallest ISE against `truth` (ties go to smaller h1, then
//! smaller h2). Throws SelectionError when every pair leaves the whole grid
//! undefined.
OracleResult oracle_search(const Dataset& data, const ErrorModel& model,
                           Estimator estimator, const ModeCurves& truth,
                           const SimConfig& cfg);

//! oracle_search on the cfg's replicate dataset.
Bandwidths oracle_bandwidths(const SimConfig& cfg, Estimator estimator, int replicate);

struct ReplicateRecord {
  Estimator estimator;
  int replicate;
  bool ok;
  double ise;
  double h1, h2;
  int undefined_points;
  std::string note;
};

struct EstimatorSummary {
  Estimator estimator;
  double mean_ise;
  double se;  // SD / sqrt(count); 0 for a single replicate
  int n_ok;
  int n_failed;
  int undefined_points;  // summed over replicates
};

struct MCResult {
  SimConfig cfg;
  std::vector<EstimatorSummary> summaries;  // in cfg.estimators order
  std::vector<ReplicateRecord> replicates;  // estimator-major, replicate order
};

MCResult run_mc_experiment(const SimConfig& cfg);

//! One row per estimator: scenario, lambda, estimator, mean_ise, se, n_ok,
//! n_failed, undefined_points.
void write_table_csv(std::ostream& os, const MCResult& r);
void write_replicates_csv(std::ostream& os, const MCResult& r);

}  // namespace modereg
