#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "modereg/bandwidth.hpp"
#include "modereg/cli.hpp"
#include "modereg/density_est.hpp"
#include "modereg/errors.hpp"
#include "modereg/metrics.hpp"
#include "modereg/mode_seek.hpp"
#include "modereg/simulation.hpp"
#include "modereg/theory.hpp"

namespace py = pybind11;
using namespace modereg;

namespace {

Dataset make_data(std::vector<double> w, std::vector<double> y) {
  return Dataset(std::move(w), std::move(y));
}

py::dict curves_dict(const ModeCurves& c) {
  py::list modes, notes;
  for (const auto& s : c.sets) {
    modes.append(py::cast(s.modes));
    notes.append(s.note);
  }
  py::dict d;
  d["x"] = c.grid;
  d["modes"] = modes;
  d["notes"] = notes;
  d["delta"] = c.delta;
  return d;
}

ModeCurves curves_from(const std::vector<double>& x, const std::vector<std::vector<double>>& modes,
                       double delta) {
  if (x.size() != modes.size()) throw DataError("x and modes must have the same length");
  ModeCurves c;
  c.grid = x;
  c.delta = delta;
  for (std::size_t k = 0; k < x.size(); ++k) {
    ModeSet s;
    s.x = x[k];
    s.modes = modes[k];
    c.sets.push_back(std::move(s));
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Modal regression with an error-prone covariate";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<SingularDesignError>(m, "SingularDesignError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
  py::register_exception<SelectionError>(m, "SelectionError", base.ptr());
  py::register_exception<GridMismatchError>(m, "GridMismatchError", base.ptr());
  py::register_exception<UndefinedDistanceError>(m, "UndefinedDistanceError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<ErrorModel>(m, "ErrorModel")
      .def_static("none", &ErrorModel::none)
      .def_static("laplace", &ErrorModel::laplace, py::arg("sigma_u"))
      .def_static("gaussian", &ErrorModel::gaussian, py::arg("sigma_u"))
      .def_static(
          "from_reliability",
          [](const std::string& kind, double lambda, double var_x) {
            return ErrorModel::make(parse_error_kind(kind), std::sqrt(sigma2_from_reliability(var_x, lambda)));
          },
          py::arg("kind"), py::arg("reliability"), py::arg("var_x"))
      .def_property_readonly("kind", [](const ErrorModel& e) { return std::string(to_string(e.kind())); })
      .def_property_readonly("sigma_u", &ErrorModel::sigma_u)
      .def("phi", &ErrorModel::phi, py::arg("t"))
      .def("__repr__", [](const ErrorModel& e) {
        return "ErrorModel(" + std::string(to_string(e.kind())) + ", sigma_u=" +
               std::to_string(e.sigma_u()) + ")";
      });

  m.def("sigma2_from_reliability", &sigma2_from_reliability, py::arg("var_x"), py::arg("reliability"));
  m.def("k1", &k1, py::arg("t"));
  m.def("deconv_kernel", &ku_ell, py::arg("ell"), py::arg("t"), py::arg("h1"), py::arg("model"));

  m.def(
      "joint_density",
      [](std::vector<double> w, std::vector<double> y, double h1, double h2, const ErrorModel& model,
         const std::vector<double>& x, const std::vector<double>& yq) {
        if (x.size() != yq.size()) throw DataError("x and y query points differ in length");
        const auto d = make_data(std::move(w), std::move(y));
        const Bandwidths bw(h1, h2);
        const auto k = DeconvKernels::exact(model, h1);
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = joint_density(d, bw, k, x[i], yq[i]);
        return out;
      },
      py::arg("w"), py::arg("y"), py::arg("h1"), py::arg("h2"), py::arg("model"), py::arg("x"),
      py::arg("y_query"));

  m.def(
      "conditional_density",
      [](std::vector<double> w, std::vector<double> y, double h1, double h2, const ErrorModel& model,
         const std::vector<double>& x, const std::vector<double>& yq) {
        if (x.size() != yq.size()) throw DataError("x and y query points differ in length");
        const auto d = make_data(std::move(w), std::move(y));
        const Bandwidths bw(h1, h2);
        const auto k = DeconvKernels::exact(model, h1);
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
          out[i] = cond_density_ll(d, bw, k, x[i], yq[i], false);
        return out;
      },
      py::arg("w"), py::arg("y"), py::arg("h1"), py::arg("h2"), py::arg("model"), py::arg("x"),
      py::arg("y_query"));

  m.def(
      "mode_curves",
      [](std::vector<double> w, std::vector<double> y, double h1, double h2, const ErrorModel& model,
         double lo, double hi, double delta, const std::string& estimator, int n_starts) {
        const auto d = make_data(std::move(w), std::move(y));
        SeekOptions o;
        o.estimator = parse_estimator(estimator);
        o.starts.n_starts = n_starts;
        ModeCurves c;
        {
          py::gil_scoped_release release;
          c = mode_curves(d, Bandwidths(h1, h2), model, GridSpec{lo, hi, delta}, o);
        }
        return curves_dict(c);
      },
      py::arg("w"), py::arg("y"), py::arg("h1"), py::arg("h2"), py::arg("model"), py::arg("lo"),
      py::arg("hi"), py::arg("delta"), py::arg("estimator") = "ll", py::arg("n_starts") = 4);

  m.def("h2_normal_reference", [](const std::vector<double>& y) { return h2_normal_reference(y); },
        py::arg("y"));

  m.def(
      "select_h1",
      [](std::vector<double> w, std::vector<double> y, const ErrorModel& model, double h2,
         const std::string& estimator, int B, std::uint64_t seed, std::vector<double> grid) {
        const auto d = make_data(std::move(w), std::move(y));
        CvConfig cfg;
        cfg.estimator = parse_estimator(estimator);
        cfg.B = B;
        cfg.seed = seed;
        cfg.h1_grid = std::move(grid);
        const bool naive = cfg.estimator == Estimator::Naive || model.kind() == ErrorKind::NoError;
        std::optional<CvSelection> sel;
        std::optional<SimexResult> simex;
        {
          py::gil_scoped_release release;
          if (naive) sel = minimize_cv_h1(d, effective_model(cfg.estimator, model), cfg, h2);
          else simex = cv_simex_h1(d, model, cfg, h2);
        }
        py::dict out;
        if (sel) {
          out["h1"] = sel->h1;
          out["method"] = "naive-cv";
          out["grid"] = sel->grid;
          std::vector<double> scores;
          for (const auto& s : sel->scores) scores.push_back(s.score);
          out["scores"] = scores;
        } else {
          out["h1"] = simex->h1;
          out["method"] = "simex";
          out["h1_star"] = simex->trace.h1_star;
          out["h1_star_star"] = simex->trace.h1_star_star;
          out["grid"] = simex->trace.grid;
        }
        return out;
      },
      py::arg("w"), py::arg("y"), py::arg("model"), py::arg("h2"), py::arg("estimator") = "ll",
      py::arg("B") = 15, py::arg("seed") = 0, py::arg("grid") = std::vector<double>{});

  m.def(
      "hausdorff",
      [](const std::vector<double>& a, const std::vector<double>& b) { return hausdorff(a, b); },
      py::arg("a"), py::arg("b"));

  m.def(
      "empirical_ise",
      [](const std::vector<double>& x, const std::vector<std::vector<double>>& est,
         const std::vector<std::vector<double>>& truth, double delta) {
        return empirical_ise(curves_from(x, est, delta), curves_from(x, truth, delta)).ise;
      },
      py::arg("x"), py::arg("estimated"), py::arg("truth"), py::arg("delta"));

  m.def(
      "generate",
      [](const std::string& scenario, std::size_t n, double lambda, std::uint64_t seed, int replicate) {
        SimConfig cfg;
        cfg.scenario = parse_scenario(scenario);
        cfg.n = n;
        cfg.lambda = lambda;
        cfg.seed = seed;
        const auto s = generate_dataset(resolve_sim_config(cfg), replicate);
        py::dict d;
        d["w"] = std::vector<double>(s.data.w().begin(), s.data.w().end());
        d["y"] = std::vector<double>(s.data.y().begin(), s.data.y().end());
        d["x"] = s.hidden_x;
        return d;
      },
      py::arg("scenario"), py::arg("n"), py::arg("reliability"), py::arg("seed") = 1,
      py::arg("replicate") = 0);

  m.def(
      "true_mode_curves",
      [](const std::string& scenario, double lo, double hi, double delta) {
        return curves_dict(true_mode_curves(parse_scenario(scenario), GridSpec{lo, hi, delta}));
      },
      py::arg("scenario"), py::arg("lo"), py::arg("hi"), py::arg("delta"));

  m.def(
      "run_experiment",
      [](const std::string& scenario, std::size_t n, double lambda, int replicates, std::uint64_t seed,
         std::vector<double> h1_grid, std::vector<double> h2_grid, int threads) {
        SimConfig cfg;
        cfg.scenario = parse_scenario(scenario);
        cfg.n = n;
        cfg.lambda = lambda;
        cfg.n_replicates = replicates;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.bandwidth_mode = OracleGrids{std::move(h1_grid), std::move(h2_grid)};
        cfg = resolve_sim_config(cfg);
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          write_table_csv(os, run_mc_experiment(cfg));
        }
        return os.str();
      },
      py::arg("scenario"), py::arg("n"), py::arg("reliability"), py::arg("replicates"),
      py::arg("seed") = 1, py::arg("h1_grid") = std::vector<double>{},
      py::arg("h2_grid") = std::vector<double>{}, py::arg("threads") = 0);

  m.def(
      "optimal_bandwidths",
      [](const std::string& scenario, double lambda, double n) {
        SimConfig cfg;
        cfg.scenario = parse_scenario(scenario);
        cfg.lambda = lambda;
        const AnalyticTruth truth(cfg.scenario, sim_error_model(cfg));
        const auto ob = optimal_bandwidths_ordinary(truth, n);
        py::dict d;
        d["h1"] = ob.h1;
        d["h2"] = ob.h2;
        d["r1"] = ob.r1;
        d["r2"] = ob.r2;
        d["I"] = std::vector<double>(ob.I.begin(), ob.I.end());
        return d;
      },
      py::arg("scenario"), py::arg("reliability"), py::arg("n"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
