#pragma once

// Reproducible runs: a manifest names the command, the config and the output
// directory; run() produces every artifact in memory and writes them in one
// pass at the end.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ablab/config.hpp"
#include "ablab/experiment.hpp"
#include "ablab/io.hpp"

namespace ablab::cli {

enum class Command { Holonomy, Commutator, Evolve, Sweep, EigenCheck, Quantize };
std::string_view to_string(Command c) noexcept;
/// InvalidArgument for unknown names.
Command parse_command(std::string_view text);

struct RunManifest {
  Command command{Command::Quantize};
  std::filesystem::path config_path;  // empty: built-in defaults
  std::filesystem::path output_dir;   // empty: nothing written (quantize only)
  std::optional<std::uint64_t> seed;
  std::optional<int> worker_count;

  // overrides
  std::optional<std::string> mode;  // "standard", "superseparability" or "both" (sweep)
  std::optional<std::string> delta_alpha_list;  // "0, 1/4, 1/2"
  std::optional<std::string> species;
  std::optional<std::int64_t> n_a;
  std::optional<std::int64_t> n_b;
};

struct RunResult {
  int exit_code{0};
  std::string stdout_text;  // what the tool prints
  std::string error_json;   // set when exit_code != 0
  io::OutputSet outputs;    // already written when output_dir was set
};

/// Never throws for run-time failures: they come back as exit code 1 plus an
/// error document (also written to output_dir/error.json when possible).
RunResult run(const RunManifest& manifest);

/// Loads the manifest's config (or the defaults) and applies its overrides.
config::Config load_config(const RunManifest& manifest);

/// The sweep CSV and per-point profile CSVs of one mode, exactly as run()
/// writes them (file name -> content).
std::vector<std::pair<std::string, std::string>> render_sweep_csvs(
    const std::vector<experiment::FringeRecord>& records, const std::vector<std::string>& labels,
    std::uint64_t seed);

}  // namespace ablab::cli
