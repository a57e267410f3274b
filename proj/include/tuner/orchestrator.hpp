#pragma once

/*
   The sample-analyze-refine loop.

   Each iteration draws num_sample configurations from the current
   distributions, analyzes them with at most num_process in flight, builds the
   alarm matrix from the completed analyses, then refines every parameter:
   the base via refine_base and the delta via the completion-rate factor.

   Every analysis of an iteration gets the same limit,
   remaining_budget * iteration_fraction, further clipped so that no analysis
   can run past the end of the total budget. The loop stops when the
   remaining budget drops below min_slice or max_iterations is reached.
*/

#include "tuner/analyzer.hpp"
#include "tuner/distributions.hpp"
#include "tuner/paramspace.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tuner {

class settings_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct tuner_settings {
  std::size_t num_sample = 4;
  std::size_t num_process = 1;
  double time_budget = 3600.0;   ///< seconds
  std::uint64_t seed = 0;
  double iteration_fraction = 0.5;
  std::optional<std::size_t> max_iterations;
  double min_slice = 1.0;        ///< seconds
  std::uint64_t saturation_ceiling = default_saturation_ceiling;
  double lambda_max = default_lambda_max;

  /// Throws settings_error naming the offending field.
  void validate() const;
};

struct iteration_record {
  std::size_t index = 0;
  double timeout = 0.0; ///< per-analysis limit of this iteration
  double elapsed = 0.0; ///< time charged to the budget
  std::vector<configuration> sampled_configs;
  std::vector<analysis_outcome> outcomes;
  std::vector<alarm_id> alarm_universe;
  std::size_t completed = 0;
  double eta_c = 0.0;
  double eta = 0.0;
  std::vector<param_distribution> distributions_before;
  std::vector<param_distribution> distributions_after;

  bool operator==(const iteration_record &) const = default;
};

struct best_sample {
  configuration config;
  std::size_t iteration = 0;
  std::vector<alarm_id> alarms;
  std::size_t alarm_count() const { return alarms.size(); }
};

struct tune_result {
  configuration recommended_config;
  std::optional<best_sample> best_sampled;
  std::vector<param_distribution> final_distributions;
  std::vector<iteration_record> iteration_trace;
  double wall_time_total = 0.0;
};

/// Rows for completed outcomes only; universe ordered by first appearance,
/// lexicographically within a row.
result_matrix build_result_matrix(const std::vector<analysis_outcome> &outcomes,
                                  const std::vector<configuration> &sampled_configs);

/// Mutable loop state owned by the coordinator.
struct tuner_state {
  const catalog *cat = nullptr;
  tuner_settings settings;
  std::string program_ref;
  std::vector<param_distribution> distributions;
  std::size_t next_index = 0;
  double remaining_budget = 0.0;
};

std::vector<param_distribution> initial_distributions(const catalog &cat);

configuration base_configuration(const catalog &cat,
                                 const std::vector<param_distribution> &dists);

/// Draws num_sample configurations serially. Sample s of iteration k uses
/// the substream root.split(k).split(s).split(p) for parameter p.
std::vector<configuration> sample_configurations(const catalog &cat,
                                                 const std::vector<param_distribution> &dists,
                                                 const tuner_settings &settings,
                                                 std::size_t iteration,
                                                 const random_stream &root);

/// One sample-analyze-refine round. Updates state.distributions,
/// state.remaining_budget and state.next_index.
iteration_record execute_iteration(tuner_state &state, const random_stream &root,
                                   analyzer &backend);

using iteration_observer = std::function<void(const iteration_record &)>;

tune_result tune(const std::string &program_ref, const catalog &cat,
                 const tuner_settings &settings, analyzer &backend,
                 const iteration_observer &observer = {});

} // namespace tuner
