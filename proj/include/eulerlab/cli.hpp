#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eulerlab/grid.hpp"

namespace eulerlab::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kToleranceFailure = 1, kUsage = 2, kHypothesisViolation = 3 };

/// Everything a run depends on; serialized into every JSON output.
struct RunConfig {
  std::string subcommand;
  std::optional<Grid2> grid;          ///< --grid, or the grid of the first input field
  double support_tol = 1e-10;         ///< |u| threshold for support and stagnation detection
  double tol = 0.05;                  ///< pass/fail tolerance of the subcommand
  std::optional<double> eps;          ///< retraction distance; defaults to 4h
  double sweep_tol_multiplier = 10.0;
  double eigen_tol = 1e-8;
  int levels = 20;
  int dirs = 8;
  int threads = 0;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
};

nlohmann::json to_json(const RunConfig& c);

/// Parses "x0,y0,h,nx,ny".
Grid2 parse_grid(const std::string& text);

/// Runs one subcommand; args excludes the program name. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eulerlab::cli
