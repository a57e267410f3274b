#pragma once

// Command implementations behind the strategy-tuner executable. Each returns
// a process exit status and writes diagnostics to `err`.

#include "tuner/run_config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace tuner {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_unavailable = 3;

/// Command-line values that take precedence over the run configuration.
struct run_overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> budget;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> processes;
  std::optional<std::size_t> iterations;
  std::optional<std::string> out;
};

/// Writes trace.ndjson, recommended.cfg, result.json and summary.txt.
int cmd_tune(const std::string &config_path, const run_overrides &overrides,
             std::ostream &out, std::ostream &err);

/// An empty low_path selects the catalog's initial bases; high_path is
/// required. Writes dominancy.tsv and dominancy.json.
int cmd_dominancy(const std::string &config_path, const std::string &low_path,
                  const std::string &high_path, const run_overrides &overrides,
                  std::ostream &out, std::ostream &err);

/// Writes one SVG per parameter plus alarms.svg into out_dir.
int cmd_plot(const std::string &trace_path, const std::string &out_dir,
             std::ostream &out, std::ostream &err);

/// Evaluates the synthetic profile of the run configuration once and prints
/// the alarm set, one per line. An empty config_file selects initial bases.
int cmd_simulate(const std::string &config_path, const std::string &config_file,
                 std::ostream &out, std::ostream &err);

} // namespace tuner
