#pragma once

/*
   Synthetic analyzer for reproducible experiments.

   A profile lists alarms. Each alarm is either incompressible (always
   reported) or carries an elimination requirement: a configuration-shaped
   lower bound, with unspecified parameters at bottom. The alarm is suppressed
   exactly when the analyzed configuration dominates the requirement
   pointwise, which makes the analyzer monotone. Optional twists break
   monotonicity: a twisted alarm is reported whenever a parameter's precision
   contribution exceeds a threshold.

   Cost is base_cost + sum(weight_i * contribution_i), where the contribution
   is the value itself (int), 1 if true (bool), or the popcount (bits).

   Profile file:

       base_cost = 0.5
       [cost]
       slevel = 0.001
       [alarm.alarm-1]
       slevel = 104
       [alarm.alarm-2]
       incompressible = true
       [twist.t1]
       alarm = alarm-1
       parameter = partition-history
       threshold = 2
*/

#include "tuner/analyzer.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace tuner {

struct synthetic_alarm {
  alarm_id id;
  std::optional<configuration> requirement; ///< nullopt: incompressible
};

struct synthetic_twist {
  alarm_id alarm;
  std::size_t param = 0;
  double threshold = 0.0;
};

struct synthetic_profile {
  catalog cat;
  std::vector<synthetic_alarm> alarms;
  double base_cost = 1.0;
  std::vector<double> cost_weights; ///< one per catalog parameter
  std::vector<synthetic_twist> twists;

  bool monotone() const { return twists.empty(); }
};

synthetic_profile parse_synthetic_profile(std::string_view text, const catalog &cat);

/// The requirement builder used by tests: bottom except the given values.
configuration requirement(const catalog &cat,
                          const std::vector<std::pair<std::string, lattice_value>> &at_least);

double precision_contribution(const lattice_value &v);

std::vector<alarm_id> synthetic_alarms(const synthetic_profile &profile,
                                       const configuration &config);
double synthetic_cost(const synthetic_profile &profile, const configuration &config);

class synthetic_analyzer final : public analyzer {
public:
  explicit synthetic_analyzer(synthetic_profile profile, bool virtual_clock = true);

  analysis_outcome run(const analysis_task &task) override;
  bool uses_virtual_clock() const override { return virtual_clock_; }

  const synthetic_profile &profile() const { return profile_; }

private:
  synthetic_profile profile_;
  bool virtual_clock_;
};

class unbounded_requirement : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Pointwise join of all elimination requirements: the least configuration
/// that suppresses every suppressible alarm of a monotone profile.
configuration synthetic_oracle_least_config(const synthetic_profile &profile);

} // namespace tuner
