#include "modereg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/math/tools/roots.hpp>

#include "modereg/errors.hpp"
#include "modereg/parallel.hpp"
#include "modereg/random.hpp"

namespace modereg {

std::string_view to_string(Scenario s) noexcept { return s == Scenario::C1 ? "C1" : "C2"; }

Scenario parse_scenario(std::string_view name) {
  if (name == "C1" || name == "c1") return Scenario::C1;
  if (name == "C2" || name == "c2") return Scenario::C2;
  throw ConfigError("scenario: unknown scenario '" + std::string(name) + "'");
}

double fx_true(double x) noexcept { return x >= kXLow && x <= kXHigh ? 0.25 : 0.0; }

DensityY conditional_density_y(Scenario s, double x, double y) {
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  const auto mix = scenario_mixture(s, x);
  DensityY d{0.0, 0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    const double sd = mix.sd[k];
    const double z = (y - mix.mean[k]) / sd;
    const double phi = 0.5 * kInvSqrt2Pi * std::exp(-0.5 * z * z) / sd;
    d.p += phi;
    d.py += -z / sd * phi;
    d.pyy += (z * z - 1.0) / (sd * sd) * phi;
  }
  return d;
}

std::vector<double> nominal_modes(Scenario s, double x) {
  const double m = x + x * x;
  if (s == Scenario::C1) return {m};
  return {m - 6.0, m};
}

std::vector<double> truth_offset_starts(Scenario s, const FixedTruthOffsets& rule, double x) {
  std::vector<double> out;
  for (double m : nominal_modes(s, x))
    for (double o : rule.offsets) out.push_back(m + o);
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < count; ++k)
    g[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1.0));
  return g;
}

// With [0.08, 1.2] for both, the ISE minimizer sat on the grid edge in most
// replicates: naive h1 at 0.08, h2 at 1.2 for every estimator.
std::vector<double> default_oracle_h1_grid() { return log_spaced(0.04, 1.2, 14); }
std::vector<double> default_oracle_h2_grid() { return log_spaced(0.08, 4.0, 14); }

namespace {

void check_grid(const std::vector<double>& g, const char* field) {
  if (g.empty()) throw ConfigError(std::string(field) + ": must not be empty");
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!(g[k] > 0.0) || !std::isfinite(g[k]))
      throw ConfigError(std::string(field) + ": bandwidths must be finite and positive");
    if (k > 0 && !(g[k] > g[k - 1]))
      throw ConfigError(std::string(field) + ": must be strictly increasing");
  }
}

}  // namespace

SimConfig resolve_sim_config(const SimConfig& cfg) {
  SimConfig c = cfg;
  if (c.n < 2) throw ConfigError("n: must be at least 2");
  if (!(c.lambda > 0.0 && c.lambda <= 1.0)) throw ConfigError("lambda: must lie in (0, 1]");
  if (c.n_replicates < 1) throw ConfigError("n_replicates: must be at least 1");
  if (!(c.grid.hi > c.grid.lo) || !(c.grid.delta > 0.0))
    throw ConfigError("grid: need lo < hi and delta > 0");
  if (c.estimators.empty()) throw ConfigError("estimators: must not be empty");
  if (c.max_iter < 1) throw ConfigError("max_iter: must be at least 1");
  if (auto* rule = std::get_if<StartRule>(&c.start_rule)) {
    if (rule->n_starts < 1) throw ConfigError("start_rule.n_starts: must be at least 1");
  } else if (std::get<FixedTruthOffsets>(c.start_rule).offsets.empty()) {
    throw ConfigError("start_rule.offsets: must not be empty");
  }
  if (auto* o = std::get_if<OracleGrids>(&c.bandwidth_mode)) {
    if (o->h1_grid.empty()) o->h1_grid = default_oracle_h1_grid();
    if (o->h2_grid.empty()) o->h2_grid = default_oracle_h2_grid();
    check_grid(o->h1_grid, "bandwidth.h1_grid");
    check_grid(o->h2_grid, "bandwidth.h2_grid");
  } else {
    const auto& cv = std::get<SimexSelection>(c.bandwidth_mode).cv;
    if (!cv.h1_grid.empty()) check_grid(cv.h1_grid, "bandwidth.h1_grid");
    if (cv.B < 1) throw ConfigError("bandwidth.B: must be at least 1");
  }
  return c;
}

ErrorModel sim_error_model(const SimConfig& cfg) {
  return ErrorModel::make(cfg.error_kind, std::sqrt(sigma2_from_reliability(kVarX, cfg.lambda)));
}

SimulatedData generate_dataset(const SimConfig& cfg, int replicate) {
  const auto rep = static_cast<std::uint64_t>(replicate);
  Rng rx(derive_seed(cfg.seed, {rep, 0}));
  Rng ry(derive_seed(cfg.seed, {rep, 1}));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto unit = [](Rng& r) { return static_cast<double>(r() >> 11) * 0x1.0p-53; };

  const std::size_t n = cfg.n;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = kXLow + (kXHigh - kXLow) * unit(rx);
    const auto mix = scenario_mixture(cfg.scenario, x[i]);
    const int k = unit(ry) < 0.5 ? 0 : 1;
    y[i] = mix.mean[k] + mix.sd[k] * normal(ry);
  }
  const auto u = sample_errors(sim_error_model(cfg), n, derive_seed(cfg.seed, {rep, 2}));
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + u[i];
  return {Dataset(std::move(w), std::move(y)), std::move(x)};
}

ModeSet true_mode_set(Scenario s, double x) {
  const auto mix = scenario_mixture(s, x);
  const double lo = std::min(mix.mean[0] - 6.0 * mix.sd[0], mix.mean[1] - 6.0 * mix.sd[1]);
  const double hi = std::max(mix.mean[0] + 6.0 * mix.sd[0], mix.mean[1] + 6.0 * mix.sd[1]);
  constexpr int kPoints = 4000;
  const double step = (hi - lo) / kPoints;
  auto py = [&](double y) { return conditional_density_y(s, x, y).py; };

  ModeSet set;
  set.x = x;
  double a = lo, fa = py(a);
  for (int k = 1; k <= kPoints; ++k) {
    const double b = lo + step * k, fb = py(b);
    if (fa > 0.0 && fb <= 0.0) {
      double mode = b;
      if (fb < 0.0) {
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(
            py, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
        // the bracket endpoint with the smaller derivative magnitude
        mode = std::abs(py(r.first)) <= std::abs(py(r.second)) ? r.first : r.second;
      }
      if (conditional_density_y(s, x, mode).pyy < 0.0) {
        set.modes.push_back(mode);
        set.diagnostics.push_back({0, std::abs(py(mode)), 0.0,
                                   conditional_density_y(s, x, mode).pyy});
      }
    }
    a = b;
    fa = fb;
  }
  set.n_starts = set.n_converged = static_cast<int>(set.modes.size());
  return set;
}

ModeSet true_mode_set(const SimConfig& cfg, double x) { return true_mode_set(cfg.scenario, x); }

ModeCurves true_mode_curves(Scenario s, const GridSpec& grid) {
  ModeCurves c;
  c.grid = grid.points();
  c.delta = grid.delta;
  for (double x : c.grid) c.sets.push_back(true_mode_set(s, x));
  return c;
}

namespace {

std::vector<std::vector<double>> all_starts(const Dataset& data, const SimConfig& cfg,
                                            const std::vector<double>& grid,
                                            std::vector<std::string>& notes) {
  std::vector<std::vector<double>> out(grid.size());
  notes.assign(grid.size(), {});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (const auto* rule = std::get_if<StartRule>(&cfg.start_rule)) {
      try {
        out[k] = starting_values(data, grid[k], *rule);
      } catch (const InsufficientDataError& e) {
        notes[k] = e.what();
      }
    } else {
      out[k] = truth_offset_starts(cfg.scenario, std::get<FixedTruthOffsets>(cfg.start_rule),
                                   grid[k]);
    }
  }
  return out;
}

SeekOptions seek_options(const SimConfig& cfg, Estimator est, const Dataset& data) {
  SeekOptions o;
  o.estimator = est;
  o.max_iter = cfg.max_iter;
  if (const auto* rule = std::get_if<StartRule>(&cfg.start_rule)) o.starts = *rule;
  return resolve_options(o, data);
}

}  // namespace

OracleResult oracle_search(const Dataset& data, const ErrorModel& model,
                           Estimator estimator, const ModeCurves& truth,
                           const SimConfig& cfg_in) {
  const auto cfg = resolve_sim_config(cfg_in);
  const auto& grids = std::get<OracleGrids>(cfg.bandwidth_mode);
  const auto grid = cfg.grid.points();
  if (truth.grid.size() != grid.size()) throw GridMismatchError("truth curves are on a different grid");
  const auto opts = seek_options(cfg, estimator, data);
  const auto m = effective_model(estimator, model);
  std::vector<std::string> start_notes;
  const auto starts = all_starts(data, cfg, grid, start_notes);
  const double penalty = ise_penalty_distance(truth);
  const auto y = data.y();

  OracleResult best;
  double best_ise = std::numeric_limits<double>::infinity();
  bool found = false;
  std::vector<std::optional<LocalFit>> fits(grid.size());
  std::vector<std::string> fit_notes(grid.size());
  for (double h1 : grids.h1_grid) {
    const auto kernels =
        DeconvKernels::tabulated(m, h1, max_kernel_argument(data, grid.front(), grid.back(), h1));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      fits[k].reset();
      fit_notes[k] = start_notes[k];
      if (starts[k].empty()) continue;
      try {
        fits[k] = local_fit(data, kernels, estimator, grid[k]);
      } catch (const SingularDesignError& e) {
        fit_notes[k] = e.what();
      }
    }
    for (double h2 : grids.h2_grid) {
      ModeCurves curves;
      curves.grid = grid;
      curves.delta = cfg.grid.delta;
      curves.sets.reserve(grid.size());
      // ISE accumulates monotonically, so a pair can be dropped as soon as
      // its partial sum reaches the best total.
      double partial = 0.0;
      bool defined_somewhere = false, abandoned = false;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        ModeSet set;
        if (fits[k]) {
          set = seek_modes(*fits[k], y, h2, starts[k], opts);
        } else {
          set.x = grid[k];
          set.note = fit_notes[k];
        }
        defined_somewhere = defined_somewhere || !set.modes.empty();
        partial += ise_term(set, truth.sets[k], penalty) * cfg.grid.delta;
        curves.sets.push_back(std::move(set));
        if (partial >= best_ise) {
          abandoned = true;
          break;
        }
      }
      if (abandoned || !defined_somewhere) continue;
      best_ise = partial;
      best.bw = Bandwidths(h1, h2);
      best.curves = std::move(curves);
      found = true;
    }
  }
  if (!found)
    throw SelectionError("oracle search: every bandwidth pair left the whole grid without modes");
  best.report = empirical_ise(best.curves, truth);
  return best;
}

Bandwidths oracle_bandwidths(const SimConfig& cfg_in, Estimator estimator, int replicate) {
  const auto cfg = resolve_sim_config(cfg_in);
  if (!std::holds_alternative<OracleGrids>(cfg.bandwidth_mode))
    throw ConfigError("bandwidth: oracle bandwidths need oracle grids");
  const auto sim = generate_dataset(cfg, replicate);
  const auto truth = true_mode_curves(cfg.scenario, cfg.grid);
  return oracle_search(sim.data, sim_error_model(cfg), estimator, truth, cfg).bw;
}

namespace {

ReplicateRecord run_replicate(const SimConfig& cfg, Estimator est, int rep,
                              const ModeCurves& truth) {
  ReplicateRecord rec{est, rep, false, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 0, {}};
  try {
    const auto sim = generate_dataset(cfg, rep);
    const auto model = sim_error_model(cfg);
    if (std::holds_alternative<OracleGrids>(cfg.bandwidth_mode)) {
      const auto r = oracle_search(sim.data, model, est, truth, cfg);
      rec.h1 = r.bw.h1;
      rec.h2 = r.bw.h2;
      rec.ise = r.report.ise;
      rec.undefined_points = r.report.undefined_points;
    } else {
      auto cv = std::get<SimexSelection>(cfg.bandwidth_mode).cv;
      cv.threads = 1;
      cv.estimator = est;
      cv.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(rep), 3,
                                       static_cast<std::uint64_t>(est)});
      const double h2 = h2_normal_reference(sim.data.y());
      double h1;
      if (est == Estimator::Naive || model.kind() == ErrorKind::NoError)
        h1 = minimize_cv_h1(sim.data, model, cv, h2).h1;
      else
        h1 = cv_simex_h1(sim.data, model, cv, h2).h1;
      const Bandwidths bw(h1, h2);
      const auto opts = seek_options(cfg, est, sim.data);
      ModeCurves curves;
      if (const auto* offsets = std::get_if<FixedTruthOffsets>(&cfg.start_rule)) {
        const StartProvider starts = [&](double x) {
          return truth_offset_starts(cfg.scenario, *offsets, x);
        };
        curves = mode_curves(sim.data, bw, model, cfg.grid, opts, starts);
      } else {
        curves = mode_curves(sim.data, bw, model, cfg.grid, opts);
      }
      const auto report = empirical_ise(curves, truth);
      rec.h1 = h1;
      rec.h2 = h2;
      rec.ise = report.ise;
      rec.undefined_points = report.undefined_points;
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec.note = e.what();
  }
  return rec;
}

}  // namespace

MCResult run_mc_experiment(const SimConfig& cfg_in) {
  MCResult res;
  res.cfg = resolve_sim_config(cfg_in);
  const auto& cfg = res.cfg;
  const auto truth = true_mode_curves(cfg.scenario, cfg.grid);
  const auto R = static_cast<std::size_t>(cfg.n_replicates);
  const std::size_t E = cfg.estimators.size();
  res.replicates.resize(E * R);
  parallel_for(
      E * R,
      [&](std::size_t idx) {
        const std::size_t e = idx / R, r = idx % R;
        res.replicates[idx] = run_replicate(cfg, cfg.estimators[e], static_cast<int>(r), truth);
      },
      cfg.threads);

  for (std::size_t e = 0; e < E; ++e) {
    EstimatorSummary s{cfg.estimators[e], std::numeric_limits<double>::quiet_NaN(), 0.0, 0, 0, 0};
    double sum = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const auto& rec = res.replicates[e * R + r];
      if (!rec.ok) {
        ++s.n_failed;
        continue;
      }
      ++s.n_ok;
      sum += rec.ise;
      s.undefined_points += rec.undefined_points;
    }
    if (s.n_ok > 0) {
      s.mean_ise = sum / s.n_ok;
      double ss = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const auto& rec = res.replicates[e * R + r];
        if (rec.ok) ss += (rec.ise - s.mean_ise) * (rec.ise - s.mean_ise);
      }
      s.se = s.n_ok > 1 ? std::sqrt(ss / (s.n_ok - 1)) / std::sqrt(static_cast<double>(s.n_ok))
                        : 0.0;
    }
    res.summaries.push_back(s);
  }
  return res;
}

void write_table_csv(std::ostream& os, const MCResult& r) {
  const auto old = os.precision(17);
  os << "scenario,lambda,estimator,mean_ise,se,n_ok,n_failed,undefined_points\n";
  for (const auto& s : r.summaries)
    os << to_string(r.cfg.scenario) << ',' << r.cfg.lambda << ',' << to_string(s.estimator)
       << ',' << s.mean_ise << ',' << s.se << ',' << s.n_ok << ',' << s.n_failed << ','
       << s.undefined_points << '\n';
  os.precision(old);
}

void write_replicates_csv(std::ostream& os, const MCResult& r) {
  const auto old = os.precision(17);
  os << "scenario,lambda,estimator,replicate,ok,ise,h1,h2,undefined_points,note\n";
  for (const auto& rec : r.replicates) {
    std::string note = rec.note;
    std::replace(note.begin(), note.end(), ',', ';');
    std::replace(note.begin(), note.end(), '\n', ' ');
    os << to_string(r.cfg.scenario) << ',' << r.cfg.lambda << ',' << to_string(rec.estimator)
       << ',' << rec.replicate << ',' << (rec.ok ? 1 : 0) << ',' << rec.ise << ',' << rec.h1
       << ',' << rec.h2 << ',' << rec.undefined_points << ',' << note << '\n';
  }
  os.precision(old);
}

}  // namespace modereg
