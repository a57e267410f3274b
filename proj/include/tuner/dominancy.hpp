#pragma once

/*
   Controlled experiments that rank parameters by influence.

   Given a low-precision baseline L and a high-precision baseline H, each
   parameter gets two extra analyses:
     selected: the parameter from H, every other parameter from L;
     excluded: the parameter from L, every other parameter from H.
   With a = #L - #selected, b = #excluded - #H and d = #L - #H, the
   influence score is (0.5 a + 0.5 b) / d.
*/

#include "tuner/analyzer.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tuner {

class baselines_do_not_separate : public std::invalid_argument {
public:
  baselines_do_not_separate() : std::invalid_argument("baselines do not separate") {}
};

class baseline_unavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

double influence_score(std::size_t alarms_low, std::size_t alarms_high,
                       std::size_t alarms_selected, std::size_t alarms_excluded);

struct controlled_pair {
  std::string param_name;
  configuration selected_config;
  configuration excluded_config;
  std::optional<std::size_t> alarms_selected; ///< nullopt: analysis failed
  std::optional<std::size_t> alarms_excluded;
};

struct dominancy_report {
  std::size_t alarms_low = 0;
  std::size_t alarms_high = 0;
  std::vector<controlled_pair> pairs;
  std::vector<std::optional<double>> scores; ///< nullopt: unavailable
  std::optional<std::size_t> dominant;
  bool dominant_tied = false;
  std::size_t invocations = 0;

  long long d() const {
    return static_cast<long long>(alarms_low) - static_cast<long long>(alarms_high);
  }
};

/// Selected and excluded configurations for parameter `i`.
controlled_pair make_controlled_pair(const configuration &low,
                                     const configuration &high, std::size_t i);

/// Scores and ranking from already-observed outcomes. selected/excluded are
/// aligned with the pairs. Throws baselines_do_not_separate when d <= 0.
dominancy_report assemble_report(const catalog &cat, std::size_t alarms_low,
                                 std::size_t alarms_high,
                                 std::vector<controlled_pair> pairs,
                                 const std::vector<analysis_outcome> &selected,
                                 const std::vector<analysis_outcome> &excluded);

/// Runs both baselines, then the 2 * |catalog| controlled analyses on a pool
/// of num_process workers.
dominancy_report run_dominancy(const std::string &program_ref,
                               const configuration &low_config,
                               const configuration &high_config, const catalog &cat,
                               analyzer &backend, double timeout,
                               std::size_t num_process = 1);

/// Tab-separated table: parameter, a, b, d, s, dominant.
std::string format_dominancy_table(const dominancy_report &report);

} // namespace tuner
