#include "modereg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "modereg/csv.hpp"
#include "modereg/errors.hpp"
#include "modereg/metrics.hpp"
#include "modereg/theory.hpp"

namespace modereg::cli {

using nlohmann::json;

// ---- config parsing ----

namespace {

// Reads keys of one JSON object, rejecting any it was not asked about.
class Section {
public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) throw ConfigError(name(key) + ": unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }
  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(name(key) + ": must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(name(key) + ": must be finite");
    return d;
  }
  double positive(const std::string& key) {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError(name(key) + ": must be positive");
    return d;
  }
  long long integer(const std::string& key, long long min) {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(name(key) + ": must be an integer");
    const auto i = v.get<long long>();
    if (i < min) throw ConfigError(name(key) + ": must be at least " + std::to_string(min));
    return i;
  }
  std::string string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(name(key) + ": must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) throw ConfigError(name(key) + ": must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(name(key) + ": must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Section sub(const std::string& key) { return Section(at(key), name(key)); }

private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto named(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

std::vector<double> increasing_positive(Section& s, const std::string& key) {
  auto v = s.numbers(key);
  if (v.empty()) throw ConfigError(s.name(key) + ": must not be empty");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] > 0.0) || !std::isfinite(v[k]))
      throw ConfigError(s.name(key) + ": entries must be finite and positive");
    if (k > 0 && !(v[k] > v[k - 1]))
      throw ConfigError(s.name(key) + ": entries must be strictly increasing");
  }
  return v;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Section root(doc, "");
  if (root.has("seed")) c.seed = static_cast<std::uint64_t>(root.integer("seed", 0));
  if (root.has("threads")) c.threads = static_cast<int>(root.integer("threads", 0));
  if (root.has("estimator"))
    c.estimator = named("estimator", [&] { return parse_estimator(root.string("estimator")); });

  if (root.has("error")) {
    auto s = root.sub("error");
    if (s.has("kind"))
      c.error.kind = named("error.kind", [&] { return parse_error_kind(s.string("kind")); });
    if (s.has("sigma_u")) {
      const double v = s.number("sigma_u");
      if (v < 0.0) throw ConfigError("error.sigma_u: must be nonnegative");
      c.error.sigma_u = v;
    }
    if (s.has("variance")) {
      const double v = s.number("variance");
      if (v < 0.0) throw ConfigError("error.variance: must be nonnegative");
      c.error.variance = v;
    }
    if (s.has("lambda")) {
      const double v = s.number("lambda");
      if (!(v > 0.0 && v <= 1.0)) throw ConfigError("error.lambda: must lie in (0, 1]");
      c.error.lambda = v;
    }
    if (s.has("var_x")) c.error.var_x = s.positive("var_x");
    const int given = c.error.sigma_u.has_value() + c.error.variance.has_value() +
                      c.error.lambda.has_value();
    if (given > 1)
      throw ConfigError("error: give only one of sigma_u, variance and lambda");
    if (c.error.var_x && !c.error.lambda)
      throw ConfigError("error.var_x: only meaningful together with error.lambda");
  }

  if (root.has("bandwidth")) {
    auto s = root.sub("bandwidth");
    if (s.has("mode")) {
      c.bandwidth = s.string("mode");
      if (c.bandwidth != "fixed" && c.bandwidth != "simex" && c.bandwidth != "naive-cv" &&
          c.bandwidth != "oracle")
        throw ConfigError("bandwidth.mode: must be fixed, simex, naive-cv or oracle");
    }
    if (s.has("h1")) c.h1 = s.positive("h1");
    if (s.has("h2")) c.h2 = s.positive("h2");
    if (s.has("B")) c.cv.B = static_cast<int>(s.integer("B", 1));
    if (s.has("h1_grid")) c.cv.h1_grid = increasing_positive(s, "h1_grid");
    if (s.has("h2_grid")) {
      auto& og = std::get<OracleGrids>(c.sim.bandwidth_mode);
      og.h2_grid = increasing_positive(s, "h2_grid");
    }
    if (s.has("weight_percentiles")) {
      const auto p = s.numbers("weight_percentiles");
      if (p.size() != 2 || !(p[0] >= 0.0 && p[0] <= p[1] && p[1] <= 100.0))
        throw ConfigError("bandwidth.weight_percentiles: need [low, high] within [0, 100]");
      c.cv.weight_percentiles = {p[0], p[1]};
    }
  }

  if (root.has("grid")) {
    auto s = root.sub("grid");
    GridSpec g{s.number("lo"), s.number("hi"), s.positive("delta")};
    if (!(g.hi > g.lo)) throw ConfigError("grid.hi: must exceed grid.lo");
    c.grid = g;
  }

  if (root.has("starts")) {
    auto s = root.sub("starts");
    auto& r = c.seek.starts;
    if (s.has("n_starts")) r.n_starts = static_cast<int>(s.integer("n_starts", 1));
    if (s.has("window")) r.window = s.positive("window");
    if (s.has("min_points")) r.min_points = static_cast<int>(s.integer("min_points", 2));
    if (s.has("low")) r.low = s.number("low");
    if (s.has("high")) r.high = s.number("high");
    if (!(r.low >= 0.0 && r.low <= r.high && r.high <= 100.0))
      throw ConfigError("starts.low: need 0 <= low <= high <= 100");
    if (s.has("offsets")) {
      FixedTruthOffsets f{s.numbers("offsets")};
      if (f.offsets.empty()) throw ConfigError("starts.offsets: must not be empty");
      c.sim.start_rule = f;
    }
  }

  if (root.has("seek")) {
    auto s = root.sub("seek");
    if (s.has("max_iter")) c.seek.max_iter = static_cast<int>(s.integer("max_iter", 1));
    if (s.has("tol_step")) c.seek.tol_step = s.positive("tol_step");
    if (s.has("dedup_tol")) c.seek.dedup_tol = s.positive("dedup_tol");
  }

  if (root.has("simulation")) {
    auto s = root.sub("simulation");
    if (s.has("scenario"))
      c.sim.scenario = named("simulation.scenario", [&] { return parse_scenario(s.string("scenario")); });
    if (s.has("n")) c.sim.n = static_cast<std::size_t>(s.integer("n", 2));
    if (s.has("lambda")) {
      c.sim.lambda = s.number("lambda");
      if (!(c.sim.lambda > 0.0 && c.sim.lambda <= 1.0))
        throw ConfigError("simulation.lambda: must lie in (0, 1]");
    }
    if (s.has("n_replicates"))
      c.sim.n_replicates = static_cast<int>(s.integer("n_replicates", 1));
    if (s.has("estimators")) {
      const auto& v = s.at("estimators");
      if (!v.is_array() || v.empty())
        throw ConfigError("simulation.estimators: must be a nonempty array of names");
      c.sim.estimators.clear();
      for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError("simulation.estimators: entries must be names");
        c.sim.estimators.push_back(
            named("simulation.estimators", [&] { return parse_estimator(e.get<std::string>()); }));
      }
    }
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["estimator"] = std::string(to_string(c.estimator));
  json e;
  e["kind"] = std::string(to_string(c.error.kind));
  if (c.error.sigma_u) e["sigma_u"] = *c.error.sigma_u;
  if (c.error.variance) e["variance"] = *c.error.variance;
  if (c.error.lambda) e["lambda"] = *c.error.lambda;
  if (c.error.var_x) e["var_x"] = *c.error.var_x;
  j["error"] = e;
  json b;
  b["mode"] = c.bandwidth;
  if (c.h1) b["h1"] = *c.h1;
  if (c.h2) b["h2"] = *c.h2;
  b["B"] = c.cv.B;
  if (!c.cv.h1_grid.empty()) b["h1_grid"] = c.cv.h1_grid;
  if (const auto* og = std::get_if<OracleGrids>(&c.sim.bandwidth_mode); og && !og->h2_grid.empty())
    b["h2_grid"] = og->h2_grid;
  b["weight_percentiles"] = {c.cv.weight_percentiles[0], c.cv.weight_percentiles[1]};
  j["bandwidth"] = b;
  if (c.grid) j["grid"] = {{"lo", c.grid->lo}, {"hi", c.grid->hi}, {"delta", c.grid->delta}};
  json s;
  s["n_starts"] = c.seek.starts.n_starts;
  if (c.seek.starts.window) s["window"] = *c.seek.starts.window;
  s["min_points"] = c.seek.starts.min_points;
  s["low"] = c.seek.starts.low;
  s["high"] = c.seek.starts.high;
  if (const auto* f = std::get_if<FixedTruthOffsets>(&c.sim.start_rule)) s["offsets"] = f->offsets;
  j["starts"] = s;
  json k;
  k["max_iter"] = c.seek.max_iter;
  if (c.seek.tol_step > 0.0) k["tol_step"] = c.seek.tol_step;
  if (c.seek.dedup_tol > 0.0) k["dedup_tol"] = c.seek.dedup_tol;
  j["seek"] = k;
  json sim;
  sim["scenario"] = std::string(to_string(c.sim.scenario));
  sim["n"] = c.sim.n;
  sim["lambda"] = c.sim.lambda;
  sim["n_replicates"] = c.sim.n_replicates;
  std::vector<std::string> names;
  for (auto est : c.sim.estimators) names.emplace_back(to_string(est));
  sim["estimators"] = names;
  j["simulation"] = sim;
  return j;
}

ErrorModel resolve_error(const ErrorSpec& spec, const Dataset* data) {
  if (spec.kind == ErrorKind::NoError) return ErrorModel::none();
  double var = 0.0;
  if (spec.sigma_u) {
    var = *spec.sigma_u * *spec.sigma_u;
  } else if (spec.variance) {
    var = *spec.variance;
  } else if (spec.lambda) {
    if (spec.var_x) {
      var = sigma2_from_reliability(*spec.var_x, *spec.lambda);
    } else {
      if (!data) throw ConfigError("error.var_x: needed when no data are given");
      // Var(W) = Var(X) + Var(U) and lambda = Var(X) / Var(W)
      const double sw = sample_sd(data->w());
      var = (1.0 - *spec.lambda) * sw * sw;
    }
  } else {
    throw ConfigError("error: give sigma_u, variance or lambda for error kind " +
                      std::string(to_string(spec.kind)));
  }
  return ErrorModel::make(spec.kind, std::sqrt(var));
}

// ---- commands ----

namespace {

struct Flags {
  std::string config, out, data;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> estimator, bandwidth;
  std::optional<double> h1, h2;
  int replicate = 0;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const Flags& f) {
  json doc = f.config.empty() ? json::object() : load_json(f.config);
  RunConfig c = parse_config(doc);
  const bool file_mode = doc.contains("bandwidth") && doc["bandwidth"].contains("mode");
  if (f.seed) c.seed = *f.seed;
  if (f.threads) {
    if (*f.threads < 0) throw ConfigError("threads: must be nonnegative");
    c.threads = *f.threads;
  }
  if (f.estimator)
    c.estimator = named("estimator", [&] { return parse_estimator(*f.estimator); });
  if (f.h1) {
    if (!(*f.h1 > 0.0)) throw ConfigError("h1: must be positive");
    c.h1 = *f.h1;
  }
  if (f.h2) {
    if (!(*f.h2 > 0.0)) throw ConfigError("h2: must be positive");
    c.h2 = *f.h2;
  }
  if (f.bandwidth) {
    if (*f.bandwidth != "fixed" && *f.bandwidth != "simex" && *f.bandwidth != "naive-cv")
      throw ConfigError("bandwidth: must be fixed, simex or naive-cv");
    c.bandwidth = *f.bandwidth;
  } else if (!file_mode && c.h1) {
    c.bandwidth = "fixed";
  }
  c.cv.seed = c.seed;
  c.cv.threads = c.threads;
  c.cv.estimator = c.estimator;
  c.seek.estimator = c.estimator;
  c.sim.seed = c.seed;
  c.sim.threads = c.threads;
  c.sim.max_iter = c.seek.max_iter;
  return c;
}

std::filesystem::path out_dir(const Flags& f) {
  std::filesystem::path p = f.out.empty() ? std::filesystem::path(".") : std::filesystem::path(f.out);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("out: cannot create directory '" + p.string() + "'");
  return p;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream o(p);
  if (!o) throw ConfigError("out: cannot write '" + p.string() + "'");
  return o;
}

void header(std::ostream& os, const std::string& command, const RunConfig& c) {
  os << "# modereg " << command << " config=" << to_json(c).dump() << '\n';
}

Dataset load_data(const Flags& f, std::ostream& err) {
  if (f.data.empty()) throw ConfigError("data: a CSV file with columns w,y is required");
  std::vector<std::string> warnings;
  auto d = read_wy_csv_file(f.data, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return d;
}

struct Selected {
  Bandwidths bw{1.0, 1.0};
  std::string method;
  std::optional<SimexTrace> trace;
  std::optional<CvSelection> cv;
};

Selected select_bandwidths(const Dataset& data, const ErrorModel& model, const RunConfig& c) {
  Selected s;
  const double h2 = c.h2 ? *c.h2 : h2_normal_reference(data.y());
  const std::string h2_method = c.h2 ? "given" : "normal-reference";
  double h1 = 0.0;
  std::string mode = c.bandwidth;
  if (mode == "oracle") throw ConfigError("bandwidth.mode: oracle applies to simulate only");
  if (mode == "fixed") {
    if (!c.h1) throw ConfigError("h1: required when bandwidth is fixed");
    h1 = *c.h1;
    s.method = "fixed";
  } else {
    const bool naive = mode == "naive-cv" || c.estimator == Estimator::Naive ||
                       model.kind() == ErrorKind::NoError;
    auto cv = c.cv;
    if (naive) {
      if (mode == "naive-cv") cv.estimator = Estimator::Naive;
      s.cv = minimize_cv_h1(data, mode == "naive-cv" ? ErrorModel::none() : model, cv, h2);
      h1 = s.cv->h1;
      s.method = "naive-cv";
    } else {
      auto r = cv_simex_h1(data, model, cv, h2);
      h1 = r.h1;
      s.trace = std::move(r.trace);
      s.method = "simex";
    }
  }
  s.bw = Bandwidths(h1, h2);
  s.method += "/" + h2_method;
  return s;
}

void write_bandwidths(std::ostream& os, const Selected& s) {
  os.precision(17);
  os << "h1,h2,method,h1_star,h1_star_star\n";
  os << s.bw.h1 << ',' << s.bw.h2 << ',' << s.method << ',';
  if (s.trace) os << s.trace->h1_star << ',' << s.trace->h1_star_star;
  else os << ',';
  os << '\n';
}

void write_cv_scores(std::ostream& os, const CvSelection& sel) {
  os.precision(17);
  os << "h1_candidate,score,n_weighted,n_skipped,reliable\n";
  for (std::size_t k = 0; k < sel.grid.size(); ++k)
    os << sel.grid[k] << ',' << sel.scores[k].score << ',' << sel.scores[k].n_weighted << ','
       << sel.scores[k].n_skipped << ',' << (sel.scores[k].reliable ? 1 : 0) << '\n';
}

GridSpec default_grid(const Dataset& data) {
  std::vector<double> w(data.w().begin(), data.w().end());
  const double lo = quantile(w, 0.025), hi = quantile(w, 0.975);
  if (!(hi > lo)) throw DataError("covariate has no spread to build a grid over");
  return {lo, hi, (hi - lo) / 40.0};
}

int cmd_estimate(const Flags& f, std::ostream& out, std::ostream& err) {
  auto c = load_config(f);
  const auto data = load_data(f, err);
  const auto model = resolve_error(c.error, &data);
  if (!c.grid) c.grid = default_grid(data);
  const auto dir = out_dir(f);
  const auto sel = select_bandwidths(data, model, c);
  const auto curves = mode_curves(data, sel.bw, model, *c.grid, c.seek);

  {
    auto o = open_out(dir / "modes.csv");
    header(o, "estimate", c);
    write_csv(o, curves);
  }
  {
    auto o = open_out(dir / "bandwidths.csv");
    header(o, "estimate", c);
    write_bandwidths(o, sel);
  }
  {
    auto o = open_out(dir / "diagnostics.csv");
    header(o, "estimate", c);
    o.precision(17);
    o << "x,n_starts,n_converged,n_rejected,n_modes,note\n";
    for (const auto& s : curves.sets) {
      std::string note = s.note;
      std::replace(note.begin(), note.end(), ',', ';');
      o << s.x << ',' << s.n_starts << ',' << s.n_converged << ',' << s.n_rejected << ','
        << s.modes.size() << ',' << note << '\n';
    }
  }
  if (sel.trace) {
    auto o = open_out(dir / "simex_trace.csv");
    header(o, "estimate", c);
    write_csv(o, *sel.trace);
  }
  int empty = 0;
  for (const auto& s : curves.sets) empty += s.modes.empty() ? 1 : 0;
  out << "estimator=" << to_string(c.estimator) << " h1=" << sel.bw.h1 << " h2=" << sel.bw.h2
      << " grid_points=" << curves.grid.size() << " empty_points=" << empty << '\n';
  return kOk;
}

int cmd_bandwidth(const Flags& f, std::ostream& out, std::ostream& err) {
  auto c = load_config(f);
  const auto data = load_data(f, err);
  const auto model = resolve_error(c.error, &data);
  const auto sel = select_bandwidths(data, model, c);
  if (f.out.empty()) {
    write_bandwidths(out, sel);
    if (sel.trace) write_csv(out, *sel.trace);
    return kOk;
  }
  const auto dir = out_dir(f);
  {
    auto o = open_out(dir / "bandwidths.csv");
    header(o, "bandwidth", c);
    write_bandwidths(o, sel);
  }
  if (sel.trace) {
    auto o = open_out(dir / "simex_trace.csv");
    header(o, "bandwidth", c);
    write_csv(o, *sel.trace);
  }
  if (sel.cv) {
    auto o = open_out(dir / "cv_scores.csv");
    header(o, "bandwidth", c);
    write_cv_scores(o, *sel.cv);
  }
  out << "h1=" << sel.bw.h1 << " h2=" << sel.bw.h2 << " method=" << sel.method << '\n';
  return kOk;
}

SimConfig sim_config(RunConfig& c) {
  SimConfig s = c.sim;
  if (!c.grid) c.grid = GridSpec{-2.0, 2.0, 0.1};
  s.grid = *c.grid;
  if (c.error.kind != ErrorKind::NoError) s.error_kind = c.error.kind;
  if (c.error.sigma_u || c.error.variance || c.error.lambda)
    throw ConfigError("error: simulate derives the error variance from simulation.lambda");
  if (std::holds_alternative<StartRule>(s.start_rule)) s.start_rule = c.seek.starts;
  return s;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream&) {
  auto c = load_config(f);
  json doc = f.config.empty() ? json::object() : load_json(f.config);
  const bool mode_given = f.bandwidth.has_value() ||
                          (doc.contains("bandwidth") && doc["bandwidth"].contains("mode"));
  const std::string mode = mode_given ? c.bandwidth : "oracle";
  SimConfig s = sim_config(c);
  if (mode == "oracle") {
    auto og = std::get<OracleGrids>(c.sim.bandwidth_mode);
    if (!c.cv.h1_grid.empty()) og.h1_grid = c.cv.h1_grid;
    s.bandwidth_mode = og;
  } else if (mode == "simex") {
    s.bandwidth_mode = SimexSelection{c.cv};
  } else {
    throw ConfigError("bandwidth.mode: simulate supports oracle or simex");
  }
  c.bandwidth = mode;
  s = resolve_sim_config(s);
  const auto res = run_mc_experiment(s);
  const auto dir = out_dir(f);
  {
    auto o = open_out(dir / "table.csv");
    header(o, "simulate", c);
    write_table_csv(o, res);
  }
  {
    auto o = open_out(dir / "replicates.csv");
    header(o, "simulate", c);
    write_replicates_csv(o, res);
  }
  for (const auto& sm : res.summaries)
    out << to_string(s.scenario) << " lambda=" << s.lambda << ' ' << to_string(sm.estimator)
        << " mean_ise=" << sm.mean_ise << " se=" << sm.se << " failed=" << sm.n_failed << '\n';
  return kOk;
}

int cmd_theory(const Flags& f, std::ostream& out, std::ostream&) {
  auto c = load_config(f);
  SimConfig s = sim_config(c);
  const auto model = sim_error_model(s);
  const AnalyticTruth truth(s.scenario, model);
  const auto ob = optimal_bandwidths_ordinary(truth, static_cast<double>(s.n));
  if (!f.out.empty()) {
    auto o = open_out(out_dir(f) / "theory.csv");
    header(o, "theory", c);
    write_csv(o, ob);
  }
  write_csv(out, ob);
  return kOk;
}

int cmd_generate(const Flags& f, std::ostream& out, std::ostream&) {
  auto c = load_config(f);
  SimConfig s = resolve_sim_config(sim_config(c));
  const auto sim = generate_dataset(s, f.replicate);
  auto o = open_out(out_dir(f) / "data.csv");
  o.precision(17);
  o << "w,y,x\n";
  for (std::size_t i = 0; i < sim.data.n(); ++i)
    o << sim.data.w()[i] << ',' << sim.data.y()[i] << ',' << sim.hidden_x[i] << '\n';
  out << "wrote " << sim.data.n() << " rows\n";
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modal regression with an error-prone covariate"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* sub, bool data) {
    sub->add_option("--config", f.config, "JSON config file");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--threads", f.threads, "worker threads (0: MODEREG_THREADS or all cores)");
    sub->add_option("--estimator", f.estimator, "naive | lc | ll");
    sub->add_option("--h1", f.h1, "covariate bandwidth");
    sub->add_option("--h2", f.h2, "response bandwidth");
    sub->add_option("--bandwidth", f.bandwidth, "fixed | simex | naive-cv");
    if (data) sub->add_option("--data,data", f.data, "CSV with columns w,y");
  };
  auto* est = app.add_subcommand("estimate", "estimate mode curves from w,y data");
  common(est, true);
  auto* bwc = app.add_subcommand("bandwidth", "select (h1, h2) for w,y data");
  common(bwc, true);
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  common(sim, false);
  auto* th = app.add_subcommand("theory", "asymptotically optimal bandwidths");
  common(th, false);
  auto* gen = app.add_subcommand("generate", "write one simulated dataset");
  common(gen, false);
  gen->add_option("--replicate", f.replicate, "replicate index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*est) return cmd_estimate(f, out, err);
    if (*bwc) return cmd_bandwidth(f, out, err);
    if (*sim) return cmd_simulate(f, out, err);
    if (*th) return cmd_theory(f, out, err);
    if (*gen) return cmd_generate(f, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const InsufficientDataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const GridMismatchError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kConfigError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> store;
  store.emplace_back("modereg");
  store.insert(store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : store) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace modereg::cli
