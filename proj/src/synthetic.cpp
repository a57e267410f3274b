#include "tuner/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <chrono>
#include <thread>

namespace tuner {

namespace {

double parse_double(const keytree_entry &e) {
  double v = 0;
  const auto *end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (e.value.empty() || ec != std::errc() || ptr != end)
    throw parse_error(e.line, e.value_column, "expected a real number for '" + e.key + "'");
  return v;
}

std::size_t param_index(const catalog &cat, const keytree_entry &e,
                        std::string_view name) {
  const auto idx = cat.index_of(name);
  if (!idx)
    throw parse_error(e.line, e.key == "parameter" ? e.value_column : e.key_column,
                      "unknown parameter '" + std::string(name) + "'");
  return *idx;
}

} // namespace

synthetic_profile parse_synthetic_profile(std::string_view text, const catalog &cat) {
  const auto tree = parse_keytree(text);
  synthetic_profile p;
  p.cat = cat;
  p.cost_weights.assign(cat.size(), 0.0);

  for (const auto *e : tree.in_section("")) {
    if (e->key != "base_cost")
      throw parse_error(e->line, e->key_column, "unknown profile key '" + e->key + "'");
    p.base_cost = parse_double(*e);
    if (!(p.base_cost > 0.0))
      throw parse_error(e->line, e->value_column, "base_cost must be positive");
  }

  for (const auto &section : tree.sections) {
    const auto entries = tree.in_section(section);
    if (section == "cost") {
      for (const auto *e : entries) {
        const double w = parse_double(*e);
        if (w < 0.0)
          throw parse_error(e->line, e->value_column, "cost weights must be non-negative");
        p.cost_weights[param_index(cat, *e, e->key)] = w;
      }
    } else if (section.starts_with("alarm.")) {
      synthetic_alarm alarm{section.substr(6), bottom_configuration(cat)};
      if (alarm.id.empty())
        throw parse_error(1, 1, "alarm section needs a name");
      for (const auto *e : entries) {
        if (e->key == "incompressible") {
          if (e->value != "true" && e->value != "false")
            throw parse_error(e->line, e->value_column, "expected 'true' or 'false'");
          if (e->value == "true")
            alarm.requirement.reset();
          continue;
        }
        if (!alarm.requirement)
          throw parse_error(e->line, e->key_column,
                            "incompressible alarms take no requirements");
        const auto idx = param_index(cat, *e, e->key);
        try {
          alarm.requirement = alarm.requirement->with(idx, parse_literal(cat[idx].kind, e->value));
        } catch (const literal_error &ex) {
          throw parse_error(e->line, e->value_column, ex.what());
        }
      }
      for (const auto &a : p.alarms)
        if (a.id == alarm.id)
          throw parse_error(entries.empty() ? 1 : entries.front()->line, 1,
                            "duplicate alarm '" + alarm.id + "'");
      p.alarms.push_back(std::move(alarm));
    } else if (section.starts_with("twist.")) {
      const auto *alarm = tree.find(section, "alarm");
      const auto *param = tree.find(section, "parameter");
      const auto *threshold = tree.find(section, "threshold");
      if (!alarm || !param || !threshold)
        throw parse_error(entries.empty() ? 1 : entries.front()->line, 1,
                          "twist needs 'alarm', 'parameter' and 'threshold'");
      p.twists.push_back({alarm->value, param_index(cat, *param, param->value),
                          parse_double(*threshold)});
    } else {
      throw parse_error(entries.empty() ? 1 : entries.front()->line, 1,
                        "unknown profile section '" + section + "'");
    }
  }
  for (const auto &t : p.twists)
    if (std::none_of(p.alarms.begin(), p.alarms.end(),
                     [&](const synthetic_alarm &a) { return a.id == t.alarm; }))
      throw parse_error(1, 1, "twist refers to unknown alarm '" + t.alarm + "'");
  return p;
}

configuration requirement(const catalog &cat,
                          const std::vector<std::pair<std::string, lattice_value>> &at_least) {
  auto config = bottom_configuration(cat);
  for (const auto &[name, value] : at_least) {
    const auto idx = cat.index_of(name);
    if (!idx)
      throw std::invalid_argument("unknown parameter '" + name + "'");
    config = config.with(*idx, value);
  }
  return config;
}

double precision_contribution(const lattice_value &v) {
  switch (v.kind().tag) {
  case lattice_tag::integer:
    return v.as_int().is_infinite() ? std::numeric_limits<double>::infinity()
                                    : static_cast<double>(v.as_int().value());
  case lattice_tag::boolean:
    return v.as_bool() ? 1.0 : 0.0;
  case lattice_tag::bits:
    return static_cast<double>(v.as_bits().popcount());
  }
  return 0.0;
}

std::vector<alarm_id> synthetic_alarms(const synthetic_profile &profile,
                                       const configuration &config) {
  std::vector<alarm_id> out;
  for (const auto &a : profile.alarms) {
    bool reported = !a.requirement || !config_leq(*a.requirement, config);
    for (const auto &t : profile.twists)
      if (t.alarm == a.id && precision_contribution(config.value(t.param)) > t.threshold)
        reported = true;
    if (reported)
      out.push_back(a.id);
  }
  normalize_alarms(out);
  return out;
}

double synthetic_cost(const synthetic_profile &profile, const configuration &config) {
  double cost = profile.base_cost;
  for (std::size_t i = 0; i < config.size(); ++i)
    if (profile.cost_weights[i] != 0.0)
      cost += profile.cost_weights[i] * precision_contribution(config.value(i));
  return cost;
}

synthetic_analyzer::synthetic_analyzer(synthetic_profile profile, bool virtual_clock)
    : profile_(std::move(profile)), virtual_clock_(virtual_clock) {}

analysis_outcome synthetic_analyzer::run(const analysis_task &task) {
  const double cost = synthetic_cost(profile_, task.config);
  if (cost > task.timeout) {
    if (!virtual_clock_)
      std::this_thread::sleep_for(std::chrono::duration<double>(task.timeout));
    return timed_out{task.timeout};
  }
  if (!virtual_clock_)
    std::this_thread::sleep_for(std::chrono::duration<double>(cost));
  return completed{synthetic_alarms(profile_, task.config), cost};
}

configuration synthetic_oracle_least_config(const synthetic_profile &profile) {
  auto least = bottom_configuration(profile.cat);
  for (const auto &a : profile.alarms) {
    if (!a.requirement)
      continue;
    for (const auto &v : a.requirement->values())
      if (v.is_int() && v.as_int().is_infinite())
        throw unbounded_requirement("alarm '" + a.id + "' has an infinite requirement");
    least = config_join(least, *a.requirement);
  }
  return least;
}

} // namespace tuner
