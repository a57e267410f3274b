#include "tuner/commands.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

void configure_logging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("strategy-tuner"));
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char *level = std::getenv("STRATEGY_TUNER_LOG"))
    spdlog::set_level(spdlog::level::from_str(level));
}

void add_run_flags(CLI::App *cmd, std::string &config, tuner::run_overrides &o) {
  cmd->add_option("--config", config, "run configuration file")->required();
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--budget", o.budget, "total time budget in seconds");
  cmd->add_option("--samples", o.samples, "configurations sampled per iteration");
  cmd->add_option("--processes", o.processes, "analyses run concurrently");
  cmd->add_option("--iterations", o.iterations, "stop after this many iterations");
  cmd->add_option("--out", o.out, "output directory");
}

} // namespace

int main(int argc, char **argv) {
  configure_logging();

  CLI::App app{"Tunes the abstraction strategy of a static analyzer."};
  app.require_subcommand(1);

  std::string config, low, high, trace, plot_out = "plots", params;
  tuner::run_overrides overrides;

  auto *tune = app.add_subcommand("tune", "run the sample-analyze-refine loop");
  add_run_flags(tune, config, overrides);

  auto *dominancy = app.add_subcommand("dominancy", "score parameter influence");
  add_run_flags(dominancy, config, overrides);
  dominancy->add_option("--low", low, "low-precision baseline (default: initial bases)");
  dominancy->add_option("--high", high, "high-precision baseline")->required();

  auto *plot = app.add_subcommand("plot", "chart a recorded trace");
  plot->add_option("--trace", trace, "trace.ndjson file")->required();
  plot->add_option("--out", plot_out, "output directory");

  auto *simulate = app.add_subcommand("simulate", "evaluate the synthetic profile once");
  simulate->add_option("--config", config, "run configuration file")->required();
  simulate->add_option("--params", params, "configuration file (default: initial bases)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tuner::exit_config;
  }

  if (tune->parsed())
    return tuner::cmd_tune(config, overrides, std::cout, std::cerr);
  if (dominancy->parsed())
    return tuner::cmd_dominancy(config, low, high, overrides, std::cout, std::cerr);
  if (plot->parsed())
    return tuner::cmd_plot(trace, plot_out, std::cout, std::cerr);
  return tuner::cmd_simulate(config, params, std::cout, std::cerr);
}
