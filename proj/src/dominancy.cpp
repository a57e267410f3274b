#include "tuner/dominancy.hpp"

#include <charconv>

namespace tuner {

namespace {

std::optional<std::size_t> alarm_count(const analysis_outcome &o) {
  if (const auto *c = std::get_if<completed>(&o))
    return c->alarms.size();
  return std::nullopt;
}

long long diff(std::size_t x, std::size_t y) {
  return static_cast<long long>(x) - static_cast<long long>(y);
}

std::string format_real(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 3);
  return std::string(buf, end);
}

} // namespace

double influence_score(std::size_t alarms_low, std::size_t alarms_high,
                       std::size_t alarms_selected, std::size_t alarms_excluded) {
  const long long d = diff(alarms_low, alarms_high);
  if (d <= 0)
    throw baselines_do_not_separate();
  const long long a = diff(alarms_low, alarms_selected);
  const long long b = diff(alarms_excluded, alarms_high);
  return (0.5 * static_cast<double>(a) + 0.5 * static_cast<double>(b)) /
         static_cast<double>(d);
}

controlled_pair make_controlled_pair(const configuration &low,
                                     const configuration &high, std::size_t i) {
  return {low.name(i), low.with(i, high.value(i)), high.with(i, low.value(i)),
          std::nullopt, std::nullopt};
}

dominancy_report assemble_report(const catalog &cat, std::size_t alarms_low,
                                 std::size_t alarms_high,
                                 std::vector<controlled_pair> pairs,
                                 const std::vector<analysis_outcome> &selected,
                                 const std::vector<analysis_outcome> &excluded) {
  if (diff(alarms_low, alarms_high) <= 0)
    throw baselines_do_not_separate();
  if (pairs.size() != cat.size() || selected.size() != cat.size() ||
      excluded.size() != cat.size())
    throw std::invalid_argument("assemble_report: one pair per catalog parameter expected");

  dominancy_report report;
  report.alarms_low = alarms_low;
  report.alarms_high = alarms_high;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    pairs[i].alarms_selected = alarm_count(selected[i]);
    pairs[i].alarms_excluded = alarm_count(excluded[i]);
    std::optional<double> s;
    if (pairs[i].alarms_selected && pairs[i].alarms_excluded)
      s = influence_score(alarms_low, alarms_high, *pairs[i].alarms_selected,
                          *pairs[i].alarms_excluded);
    report.scores.push_back(s);
  }
  report.pairs = std::move(pairs);

  // Ties resolve to the earliest catalog position and are flagged.
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    if (!report.scores[i])
      continue;
    if (!report.dominant || *report.scores[i] > *report.scores[*report.dominant]) {
      report.dominant = i;
      report.dominant_tied = false;
    } else if (*report.scores[i] == *report.scores[*report.dominant]) {
      report.dominant_tied = true;
    }
  }
  return report;
}

dominancy_report run_dominancy(const std::string &program_ref,
                               const configuration &low_config,
                               const configuration &high_config, const catalog &cat,
                               analyzer &backend, double timeout,
                               std::size_t num_process) {
  if (!(timeout > 0.0))
    throw std::invalid_argument("run_dominancy: timeout must be positive");

  std::vector<analysis_outcome> baselines(2, timed_out{});
  parallel_for(2, num_process, [&](std::size_t i) {
    baselines[i] = backend.run({program_ref, i == 0 ? low_config : high_config, timeout});
  });
  const auto low = alarm_count(baselines[0]);
  const auto high = alarm_count(baselines[1]);
  if (!low || !high)
    throw baseline_unavailable(std::string(!low ? "low" : "high") +
                               " baseline analysis did not complete");
  if (diff(*low, *high) <= 0)
    throw baselines_do_not_separate();

  std::vector<controlled_pair> pairs;
  for (std::size_t i = 0; i < cat.size(); ++i)
    pairs.push_back(make_controlled_pair(low_config, high_config, i));

  const std::size_t n = cat.size();
  std::vector<analysis_outcome> outcomes(2 * n, timed_out{});
  parallel_for(2 * n, num_process, [&](std::size_t k) {
    const auto &pair = pairs[k / 2];
    const auto &config = k % 2 == 0 ? pair.selected_config : pair.excluded_config;
    outcomes[k] = backend.run({program_ref, config, timeout});
  });
  std::vector<analysis_outcome> selected, excluded;
  for (std::size_t i = 0; i < n; ++i) {
    selected.push_back(outcomes[2 * i]);
    excluded.push_back(outcomes[2 * i + 1]);
  }
  auto report = assemble_report(cat, *low, *high, std::move(pairs), selected, excluded);
  report.invocations = 2 + 2 * n;
  return report;
}

std::string format_dominancy_table(const dominancy_report &report) {
  std::string out = "parameter\ta\tb\td\ts\tdominant\n";
  const auto d = report.d();
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const auto &p = report.pairs[i];
    out += p.param_name + "\t";
    out += p.alarms_selected ? std::to_string(diff(report.alarms_low, *p.alarms_selected))
                             : std::string("unavailable");
    out += "\t";
    out += p.alarms_excluded ? std::to_string(diff(*p.alarms_excluded, report.alarms_high))
                             : std::string("unavailable");
    out += "\t" + std::to_string(d) + "\t";
    out += report.scores[i] ? format_real(*report.scores[i]) : std::string("unavailable");
    out += "\t";
    if (report.dominant == i)
      out += report.dominant_tied ? "yes (tie, catalog order)" : "yes";
    out += "\n";
  }
  return out;
}

} // namespace tuner
