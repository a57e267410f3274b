#include "tuner/orchestrator.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace tuner {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

// Below this, an analysis is not worth starting.
constexpr double min_analysis_time = 1e-3;

struct dispatch_result {
  std::vector<analysis_outcome> outcomes;
  double elapsed = 0.0;
};

// List-schedules the analyses on num_process simulated workers in sample
// order. Calls are pure and instantaneous, so they run on this thread.
dispatch_result dispatch_virtual(const tuner_state &state,
                                 const std::vector<configuration> &configs,
                                 double slice, analyzer &backend) {
  const auto workers = std::max<std::size_t>(1, state.settings.num_process);
  std::vector<double> free_at(workers, 0.0);
  dispatch_result r;
  for (const auto &config : configs) {
    const auto w = static_cast<std::size_t>(
        std::min_element(free_at.begin(), free_at.end()) - free_at.begin());
    const double start = free_at[w];
    const double limit = std::min(slice, state.remaining_budget - start);
    if (limit < min_analysis_time) {
      r.outcomes.push_back(timed_out{0.0});
      continue;
    }
    auto outcome = backend.run({state.program_ref, config, limit});
    free_at[w] = start + std::min(outcome_wall_time(outcome), limit);
    r.outcomes.push_back(std::move(outcome));
  }
  r.elapsed = *std::max_element(free_at.begin(), free_at.end());
  return r;
}

dispatch_result dispatch_parallel(const tuner_state &state,
                                  const std::vector<configuration> &configs,
                                  double slice, analyzer &backend,
                                  clock_type::time_point iteration_start) {
  dispatch_result r;
  r.outcomes.assign(configs.size(), timed_out{0.0});
  parallel_for(configs.size(), state.settings.num_process, [&](std::size_t i) {
    const double limit =
        std::min(slice, state.remaining_budget - seconds_since(iteration_start));
    if (limit < min_analysis_time)
      return;
    r.outcomes[i] = backend.run({state.program_ref, configs[i], limit});
  });
  return r;
}

} // namespace

void tuner_settings::validate() const {
  if (num_sample < 1)
    throw settings_error("num_sample must be at least 1");
  if (num_process < 1)
    throw settings_error("num_process must be at least 1");
  if (!(time_budget > 0.0) || !std::isfinite(time_budget))
    throw settings_error("time_budget must be a positive number of seconds");
  if (!(iteration_fraction > 0.0 && iteration_fraction <= 1.0))
    throw settings_error("iteration_fraction must lie in (0, 1]");
  if (!(min_slice > 0.0))
    throw settings_error("min_slice must be positive");
  if (saturation_ceiling < 1)
    throw settings_error("saturation_ceiling must be positive");
  if (!(lambda_max > 0.0))
    throw settings_error("lambda_max must be positive");
}

result_matrix build_result_matrix(const std::vector<analysis_outcome> &outcomes,
                                  const std::vector<configuration> &sampled_configs) {
  if (outcomes.size() != sampled_configs.size())
    throw std::invalid_argument("build_result_matrix: outcomes and configurations differ in length");
  result_matrix matrix;
  std::set<alarm_id> seen;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto *c = std::get_if<completed>(&outcomes[i]);
    if (!c)
      continue;
    rows.push_back(i);
    auto sorted = c->alarms;
    std::sort(sorted.begin(), sorted.end());
    for (const auto &a : sorted)
      if (seen.insert(a).second)
        matrix.alarms.push_back(a);
  }
  const std::size_t params = sampled_configs.empty() ? 0 : sampled_configs.front().size();
  matrix.values_per_param.assign(params, {});
  for (const auto i : rows) {
    const auto &alarms = std::get<completed>(outcomes[i]).alarms;
    const std::set<alarm_id> produced(alarms.begin(), alarms.end());
    result_row row{i, std::vector<bool>(matrix.alarms.size(), false)};
    for (std::size_t j = 0; j < matrix.alarms.size(); ++j)
      row.produced[j] = produced.count(matrix.alarms[j]) > 0;
    matrix.rows.push_back(std::move(row));
    for (std::size_t p = 0; p < params; ++p)
      matrix.values_per_param[p].push_back(sampled_configs[i].value(p));
  }
  return matrix;
}

std::vector<param_distribution> initial_distributions(const catalog &cat) {
  std::vector<param_distribution> out;
  for (const auto &s : cat)
    out.push_back(s.initial);
  return out;
}

configuration base_configuration(const catalog &cat,
                                 const std::vector<param_distribution> &dists) {
  std::vector<lattice_value> values;
  for (const auto &d : dists)
    values.push_back(d.base());
  return configuration(cat, std::move(values));
}

std::vector<configuration> sample_configurations(const catalog &cat,
                                                 const std::vector<param_distribution> &dists,
                                                 const tuner_settings &settings,
                                                 std::size_t iteration,
                                                 const random_stream &root) {
  const auto iteration_stream = root.split(iteration);
  std::vector<configuration> configs;
  configs.reserve(settings.num_sample);
  for (std::size_t s = 0; s < settings.num_sample; ++s) {
    const auto sample_stream = iteration_stream.split(s);
    std::vector<lattice_value> values;
    values.reserve(dists.size());
    for (std::size_t p = 0; p < dists.size(); ++p) {
      auto rng = sample_stream.split(p);
      values.push_back(sample_param(dists[p], rng, settings.saturation_ceiling));
    }
    configs.emplace_back(cat, std::move(values));
  }
  return configs;
}

iteration_record execute_iteration(tuner_state &state, const random_stream &root,
                                   analyzer &backend) {
  const auto iteration_start = clock_type::now();
  const auto &cat = *state.cat;
  const auto &settings = state.settings;

  iteration_record rec;
  rec.index = state.next_index;
  rec.distributions_before = state.distributions;
  rec.timeout = state.remaining_budget * settings.iteration_fraction;
  rec.sampled_configs =
      sample_configurations(cat, state.distributions, settings, rec.index, root);

  auto dispatched = backend.uses_virtual_clock()
                        ? dispatch_virtual(state, rec.sampled_configs, rec.timeout, backend)
                        : dispatch_parallel(state, rec.sampled_configs, rec.timeout,
                                            backend, iteration_start);
  rec.outcomes = std::move(dispatched.outcomes);

  const auto matrix = build_result_matrix(rec.outcomes, rec.sampled_configs);
  rec.alarm_universe = matrix.alarms;
  rec.completed = matrix.m();
  rec.eta_c = static_cast<double>(rec.completed) / static_cast<double>(settings.num_sample);
  rec.eta = scaling_factor(rec.completed, settings.num_sample);

  std::vector<param_distribution> refined;
  refined.reserve(state.distributions.size());
  for (std::size_t p = 0; p < state.distributions.size(); ++p) {
    const auto &d = state.distributions[p];
    refined.emplace_back(refine_base(matrix, p, d.base()),
                         refine_delta(d.delta(), rec.eta, settings.lambda_max));
  }
  state.distributions = refined;
  rec.distributions_after = std::move(refined);

  rec.elapsed = backend.uses_virtual_clock() ? dispatched.elapsed
                                             : seconds_since(iteration_start);
  state.remaining_budget -= rec.elapsed;
  ++state.next_index;

  spdlog::info("iteration {}: {}/{} completed, {} alarms in universe, eta {:.4g}, "
               "remaining budget {:.4g}s",
               rec.index, rec.completed, settings.num_sample, rec.alarm_universe.size(),
               rec.eta, state.remaining_budget);
  return rec;
}

tune_result tune(const std::string &program_ref, const catalog &cat,
                 const tuner_settings &settings, analyzer &backend,
                 const iteration_observer &observer) {
  settings.validate();
  const auto start = clock_type::now();

  tuner_state state;
  state.cat = &cat;
  state.settings = settings;
  state.program_ref = program_ref;
  state.distributions = initial_distributions(cat);
  state.remaining_budget = settings.time_budget;
  const random_stream root(settings.seed);

  tune_result result;
  while (!(settings.max_iterations && state.next_index >= *settings.max_iterations) &&
         state.remaining_budget >= settings.min_slice) {
    auto rec = execute_iteration(state, root, backend);
    for (std::size_t i = 0; i < rec.outcomes.size(); ++i) {
      const auto *c = std::get_if<completed>(&rec.outcomes[i]);
      if (c && (!result.best_sampled || c->alarms.size() < result.best_sampled->alarm_count()))
        result.best_sampled = best_sample{rec.sampled_configs[i], rec.index, c->alarms};
    }
    if (observer)
      observer(rec);
    result.iteration_trace.push_back(std::move(rec));
  }

  result.final_distributions = state.distributions;
  result.recommended_config = base_configuration(cat, state.distributions);
  result.wall_time_total = backend.uses_virtual_clock()
                               ? settings.time_budget - state.remaining_budget
                               : seconds_since(start);
  return result;
}

} // namespace tuner
