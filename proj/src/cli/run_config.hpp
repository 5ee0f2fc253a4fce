#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace relinfo::cli {

struct RunOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> out_dir;    // overrides config output_path
  std::optional<std::uint64_t> seed_override;      // overrides config seed
  std::string format = "csv";
  std::optional<std::string> expected_mode;        // set by subcommand aliases
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Parses the config, dispatches to the matching module, writes the report
/// files plus a run manifest into the output directory. Returns one of the
/// kExit* codes; errors are logged to `log`.
int run_config(const RunOptions& options, std::ostream& log);

}  // namespace relinfo::cli
