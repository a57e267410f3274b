#pragma once

/*
   Run configuration file.

       program = synthetic_slevel.profile   # profile path for the synthetic backend
       catalog = my_catalog.txt             # optional override
       output_dir = out

       [settings]
       num_sample = 4
       num_process = 2
       time_budget = 3600
       seed = 1
       iteration_fraction = 0.5
       max_iterations = 20
       min_slice = 1

       [analyzer]
       backend = synthetic                  # or subprocess
       virtual_clock = true

       [adapter]                            # subprocess backend only
       command = "frama-c -eva {args} {program}"
       alarm_pattern = ^\[eva:alarm\] ([^:]+):([0-9]+): Warning: (.*)$
       alarm_join = ":"
       hash_captures = 3
       env = HOME,FRAMAC_SHARE
       grace = 2

       [dominancy]
       timeout = 600

   Inside double quotes a backslash escapes the next character; unquoted
   values are taken verbatim. Relative paths resolve against the directory
   holding the file.
*/

#include "tuner/analyzer.hpp"
#include "tuner/orchestrator.hpp"
#include "tuner/subprocess.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tuner {

class config_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class backend_kind { synthetic, subprocess };

struct run_config {
  std::string program;
  std::optional<std::string> catalog_path;
  std::string output_dir = "out";
  tuner_settings settings;
  backend_kind backend = backend_kind::synthetic;
  bool virtual_clock = true;
  adapter_config adapter;
  double dominancy_timeout = 3600.0;
};

/// Throws config_error naming the offending field.
run_config parse_run_config(std::string_view text, const std::string &base_dir);
run_config load_run_config(const std::string &path);

catalog load_run_catalog(const run_config &cfg);

std::unique_ptr<analyzer> make_analyzer(const run_config &cfg, const catalog &cat);

} // namespace tuner
