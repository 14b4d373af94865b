#include <iostream>

#include <CLI11.hpp>

#include "percolab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"percolab: bond percolation experiments on finite windows"};
  app.set_version_flag("--version", percolab::tool_version());
  app.require_subcommand(1);

  percolab::CommandOptions options;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;

  auto add = [&](const std::string& name, const std::string& help, bool needs_config) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", options.config_path, "experiment config (JSON)");
    if (needs_config) cfg->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--workers", workers, "worker threads (falls back to PERCOLAB_WORKERS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, needs_config ? "output directory" : "run directory")
        ->required(!needs_config);
    sub->callback([&options, name] { options.command = name; });
  };
  add("simulate", "raw per-sample statistics as JSONL", true);
  add("estimate", "Monte Carlo estimates with confidence intervals", true);
  add("profile", "anchored and uniform isoperimetric profiles", true);
  add("verify", "bound and identity checks; exit 2 on a violation", true);
  add("report", "plot-ready long-format CSV from a run directory", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : percolab::kExitConfig;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--workers")) options.workers = workers;
    if (sub->count("--out")) options.out = out;
  }
  return percolab::run_command(options, std::cerr, std::cerr);
}
