// kinex: command-line driver for the kinetic solvers and studies.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kinex/config.hpp"
#include "kinex/errors.hpp"
#include "kinex/harness.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Flags {
  std::optional<std::string> config;
  // Keyed by configuration key; applied after the config file.
  std::map<std::string, std::string> overrides;
};

void add_flags(CLI::App& sub, Flags& flags) {
  sub.add_option("--config", flags.config, "flat 'key = value' file; flags override it");
  const std::vector<std::pair<std::string, std::string>> keyed = {
      {"model", "bgk, esbgk, fp or boltz-mock"},
      {"integrator", "exprk2, ssprk2-explicit, strang, transport-exp or ars222 (comma list)"},
      {"transport", "upwind1 or weno5"},
      {"initial", "two-maxwellian or sod"},
      {"nx", "spatial cells (comma list for accuracy)"},
      {"nv", "velocity nodes per axis (0 selects the model default)"},
      {"vmax", "velocity cut-off"},
      {"cfl", "dt = cfl dx / vmax"},
      {"eps", "Knudsen numbers (comma list)"},
      {"eps0", "floor of the mixed-regime Knudsen field"},
      {"tfinal", "final time"},
      {"limiter", "on or off"},
      {"out", "output directory"},
  };
  for (const auto& [key, help] : keyed) {
    auto* opt = sub.add_option_function<std::string>(
        "--" + key, [&flags, key = key](const std::string& v) { flags.overrides[key] = v; }, help);
    if (key == "limiter") opt->check(CLI::IsMember({"on", "off"}));
  }
}

kinex::RunConfig assemble(kinex::Subcommand command, const Flags& flags) {
  kinex::RunConfig cfg = kinex::default_config(command);
  if (flags.config)
    for (const auto& [k, v] : kinex::read_config_file(*flags.config))
      kinex::apply_config_value(cfg, k, v);
  for (const auto& [k, v] : flags.overrides) kinex::apply_config_value(cfg, k, v);
  kinex::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential Runge-Kutta solvers for kinetic equations"};
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::pair<CLI::App*, kinex::Subcommand>> subs;
  const std::vector<std::pair<kinex::Subcommand, std::string>> described = {
      {kinex::Subcommand::run, "single simulation; profiles and step history"},
      {kinex::Subcommand::accuracy, "self-convergence orders under grid refinement"},
      {kinex::Subcommand::positivity, "negative-cell counts on Sod data"},
      {kinex::Subcommand::mixed_regime, "spatially varying Knudsen number against a reference"},
      {kinex::Subcommand::homogeneous, "space-homogeneous relaxation series"},
  };
  for (const auto& [command, help] : described) {
    auto* sub = app.add_subcommand(std::string(kinex::to_string(command)), help);
    add_flags(*sub, flags);
    subs.emplace_back(sub, command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  kinex::Subcommand command = kinex::Subcommand::run;
  for (const auto& [sub, c] : subs)
    if (sub->parsed()) command = c;

  kinex::RunConfig cfg;
  try {
    cfg = assemble(command, flags);
  } catch (const kinex::Error& e) {
    std::fprintf(stderr, "kinex: configuration error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    const kinex::ExperimentReport report = kinex::run_command(cfg);
    kinex::emit_report(report, cfg.out);
    for (const auto& t : report.tables)
      std::printf("wrote %s\n", (cfg.out / (t.name + ".csv")).string().c_str());
    std::printf("wrote %s\n", (cfg.out / "manifest.txt").string().c_str());
  } catch (const kinex::ConfigError& e) {
    std::fprintf(stderr, "kinex: configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "kinex: numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
