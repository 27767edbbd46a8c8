#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wsn::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kIoError = 3,
};

/// Fully resolved run configuration: every default filled in.
struct ScenarioConfig {
  std::string command;
  std::string scenario = "indep";  // indep | chain3 | custom
  int n = 8;
  double l = 100.0;
  double sigma_sq = 1.0;
  double alpha = 0.2;
  std::string decay = "iid";  // iid | const:G | exp:RHO
  double rate_lo = 1e-2;
  double rate_hi = 1e2;
  int rate_points = 200;
  std::vector<double> alphas;  // frontier curves
  double alpha_grid_lo = 0.01;
  double alpha_grid_hi = 0.90;
  double alpha_grid_step = 0.01;
  std::optional<double> beta;
  double beta_lo = 0.55;
  double beta_hi = 0.80;
  double beta_step = 0.005;
  double rate_cap = 1e4;
  std::uint64_t seed = 1;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> layout;
  int trials = 10000;
  int replications = 500;
  long events = 1000000;

  /// key=value lines in a fixed order.
  std::string to_text() const;
};

/// Thrown for any invalid flag or field combination (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an output cannot be written (exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Formats a number with 12 significant digits; inf and nan spelled out.
std::string format_number(double v);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

int cmd_sweep(const ScenarioConfig& cfg, std::ostream& log);
int cmd_frontier(const ScenarioConfig& cfg, std::ostream& log);
int cmd_optimize(const ScenarioConfig& cfg, std::ostream& log);
int cmd_validate(const ScenarioConfig& cfg, std::ostream& log);

/// Parses `args` (without the program name), dispatches, and maps failures
/// to exit codes. Environment variable STL_OUT supplies the default --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsn::cli
