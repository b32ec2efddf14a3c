#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modereg/bandwidth.hpp"
#include "modereg/mode_seek.hpp"
#include "modereg/simulation.hpp"

namespace modereg::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kNumericalFailure = 4,
};

//! How the error variance is specified; resolved against the data when it
//! depends on it.
struct ErrorSpec {
  ErrorKind kind = ErrorKind::NoError;
  std::optional<double> sigma_u;
  std::optional<double> variance;
  std::optional<double> lambda;  // reliability ratio
  std::optional<double> var_x;   // with lambda; default: estimated from W
};

//! Everything a command may need, parsed from a JSON config file and
//! overridden by flags.
struct RunConfig {
  ErrorSpec error;
  Estimator estimator = Estimator::LocalLinear;
  std::string bandwidth = "simex";  // fixed | simex | naive-cv (| oracle for simulate)
  std::optional<double> h1, h2;
  CvConfig cv;
  std::optional<GridSpec> grid;
  SeekOptions seek;
  SimConfig sim;
  std::uint64_t seed = 1;
  int threads = 0;
};

//! Parses a config document. Unknown keys and invalid values raise
//! ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& doc);
//! The resolved config as JSON (thread count excluded: it never changes
//! results).
nlohmann::json to_json(const RunConfig& cfg);

ErrorModel resolve_error(const ErrorSpec& spec, const Dataset* data);

//! Runs the command line; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modereg::cli
