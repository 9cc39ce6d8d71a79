#pragma once

// Run configuration: flat "key = value" files and command-line overrides.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kinex/collision.hpp"
#include "kinex/integrator.hpp"
#include "kinex/transport.hpp"

namespace kinex {

enum class Subcommand { run, accuracy, positivity, mixed_regime, homogeneous };

std::string_view to_string(Subcommand c);
Subcommand parse_subcommand(std::string_view name);

enum class InitialCondition { two_maxwellian, sod };

std::string_view to_string(InitialCondition ic);
InitialCondition parse_initial_condition(std::string_view name);

struct RunConfig {
  Subcommand command = Subcommand::run;
  CollisionModel model = CollisionModel::bgk;
  std::vector<IntegratorKind> integrators = {IntegratorKind::exprk2};
  TransportKind transport = TransportKind::weno5;
  InitialCondition initial = InitialCondition::two_maxwellian;
  std::vector<int> nx = {80};
  int nv = 150;
  double vmax = 15.0;
  double cfl = 1.0 / 24.0;
  /// Constant Knudsen numbers; ignored when eps0 > 0.
  std::vector<double> eps = {1.0};
  /// Floor of the mixed-regime Knudsen field; 0 disables it.
  double eps0 = 0.0;
  double t_final = 0.1;
  bool limiter = true;
  std::filesystem::path out = "kinex-out";
};

/// Defaults for each subcommand (the experiment parameters of the study).
RunConfig default_config(Subcommand c);

/// Known keys, in the order they are echoed.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value.  ConfigError on unknown keys or
/// malformed values.
void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses "key = value" lines; blank lines and lines starting with '#' are
/// skipped.  ConfigError (with line number) on malformed lines.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// ConfigError unless every count and parameter is admissible.
void validate(const RunConfig& cfg);

/// "key = value" lines that reproduce cfg when parsed back.
std::string echo_config(const RunConfig& cfg);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

}  // namespace kinex
