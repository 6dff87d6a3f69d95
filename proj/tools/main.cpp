#include <iostream>

#include <CLI11.hpp>

#include "cli_core.hpp"

namespace cli = openkz::cli;

int main(int argc, char** argv) {
  CLI::App app{"openkz: Lindblad quench simulator for driven two-band lattices"};
  app.require_subcommand(1);

  std::string config_path;
  cli::Overrides overrides;
  std::string out_dir;
  int workers = 0;
  std::string variant;
  int grid = 0;
  bool seedless = false;
  std::string level = "fast";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
    sub->add_option("--variant", variant, "full | no_jump");
    sub->add_option("--grid", grid, "grid points per dimension");
    sub->add_flag("--seedless", seedless, "accepted for compatibility; runs are deterministic");
  };
  CLI::App* quench = app.add_subcommand("quench", "time series of one quench");
  CLI::App* sweep = app.add_subcommand("sweep", "final-time observables over a tau_Q list");
  CLI::App* liouv = app.add_subcommand("liouvillian", "Liouvillian spectrum versus u at fixed q");
  CLI::App* validate = app.add_subcommand("validate", "oracle equivalence checks");
  for (CLI::App* sub : {quench, sweep, liouv, validate}) add_common(sub);
  validate->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::config_error;
  }

  for (CLI::App* sub : {quench, sweep, liouv, validate}) {
    if (sub->count("--out")) overrides.out_dir = out_dir;
    if (sub->count("--workers")) overrides.workers = workers;
    if (sub->count("--variant")) overrides.variant = variant;
    if (sub->count("--grid")) overrides.grid = grid;
  }

  if (validate->parsed()) {
    const auto lvl = level == "full" ? openkz::ValidationLevel::full : openkz::ValidationLevel::fast;
    return cli::cmd_validate(lvl, overrides.out_dir.value_or("."), overrides.workers.value_or(1));
  }

  cli::RunConfig cfg;
  try {
    cfg = cli::load_config(config_path, overrides);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::config_error;
  }
  try {
    if (quench->parsed()) return cli::cmd_quench(cfg);
    if (sweep->parsed()) return cli::cmd_sweep(cfg);
    return cli::cmd_liouvillian(cfg);
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return cli::numerical_failure;
  }
}
