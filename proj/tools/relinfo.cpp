#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"relinfo: relevant-information-loss analyses of deterministic systems"};
  app.require_subcommand(0, 1);

  relinfo::cli::RunOptions options;
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON analysis config");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "seed override for estimate runs");
  app.add_option("--format", options.format, "report format")->default_str("csv");

  // Subcommand aliases mirror the config modes and just pin the expected mode.
  for (const char* mode : {"channel", "pca", "ib", "estimate", "selftest"}) {
    app.add_subcommand(mode, std::string("run a '") + mode + "' config");
  }

  CLI11_PARSE(app, argc, argv);

  if (config.empty()) {
    std::cerr << "validation error: --config is required\n";
    return relinfo::cli::kExitValidation;
  }
  options.config_path = config;
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (seed_opt->count() > 0) options.seed_override = seed;
  const auto chosen = app.get_subcommands();
  if (!chosen.empty()) options.expected_mode = chosen.front()->get_name();

  return relinfo::cli::run_config(options, std::cerr);
}
