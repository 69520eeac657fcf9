#include "snncrs/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Relay-network rate computation: rates, optimize, sweep, verify-fm, selftest"};
  std::string command, config, out, schemes;
  std::uint64_t seed = 0;
  double gamma = 0.0, power = 0.0;
  app.add_option("command", command, "rates | optimize | sweep | verify-fm | selftest");
  auto* config_opt = app.add_option("--config", config, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides config)");
  auto* out_opt = app.add_option("--out", out, "output directory (overrides config)");
  auto* gamma_opt = app.add_option("--gamma", gamma, "path-loss exponent (overrides config)");
  auto* power_opt = app.add_option("--power", power, "P1 = P2 = P3 (overrides config)");
  auto* schemes_opt = app.add_option("--schemes", schemes, "comma-separated scheme list");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : snncrs::cli::kExitConfigError;
  }

  snncrs::cli::Overrides ov;
  if (!command.empty()) ov.command = command;
  if (*seed_opt) ov.seed = seed;
  if (*out_opt) ov.out_dir = out;
  if (*gamma_opt) ov.gamma = gamma;
  if (*power_opt) ov.power = power;
  if (*schemes_opt) ov.schemes = schemes;
  std::optional<std::string> path;
  if (*config_opt) path = config;
  return snncrs::cli::run_main(path, ov, std::cout, std::cerr);
}
