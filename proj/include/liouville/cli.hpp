#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "liouville/energy.hpp"
#include "liouville/quadrature.hpp"
#include "liouville/stability.hpp"

namespace liouville {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int claim_failure = 1;
inline constexpr int config_error = 2;
}  // namespace exit_code

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a subcommand needs. File keys:
///   dimension, k, radii.min, radii.max, radii.ratio, quad.radial,
///   quad.angular, tol.bridge, tol.identity, tol.divergence, seed, mode
struct RunConfig {
  int dimension = 2;
  double k = 3.0;
  double radii_min = 1.0;
  double radii_max = 128.0;
  double radii_ratio = 1.4142135623730951;
  int quad_radial = 10;
  int quad_angular = 16;
  double tol_bridge = 1e-10;
  double tol_identity = 1e-6;
  double tol_divergence = 1e-8;
  std::uint64_t seed = 42;
  std::string mode = "auto";  ///< ball | slab | auto

  bool hard_divergence = false;
  RhsMutation mutation = RhsMutation::none;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
  /// min * ratio^i for every i with the result <= max.
  std::vector<double> radii() const;
  QuadratureSpec quadrature() const;
  /// auto picks ball for N <= 3 and slab otherwise.
  GrowthMode growth_mode() const;
};

/// Sets one documented key. Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Each command writes <name>.csv and <name>_summary.csv into `out_dir`,
/// prints a short verdict to `log` and returns an exit code.
int cmd_construct(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_growth(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_energy(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_stability(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
/// Aggregates the summaries of growth, energy and stability into report.csv.
int cmd_report(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Full command line, argv[0] included.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liouville
