#include "support.hpp"

#include "tuner/subprocess.hpp"
#include "tuner/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <regex>

using namespace tuner;
using namespace testing_support;

namespace {

const char *const slevel_profile = "base_cost = 1\n"
                                   "[cost]\n"
                                   "slevel = 0.5\n"
                                   "domains = 2\n"
                                   "[alarm.small]\n"
                                   "slevel = 9\n"
                                   "[alarm.large]\n"
                                   "slevel = 104\n"
                                   "[alarm.relational]\n"
                                   "domains = 01100\n"
                                   "[alarm.real]\n"
                                   "incompressible = true\n";

configuration random_config(const catalog &cat, random_stream &rng) {
  std::vector<lattice_value> values;
  for (const auto &spec : cat) {
    // Wider than the initial deltas so requirements are crossed both ways.
    const auto &raw = spec.initial.delta().raw();
    if (std::holds_alternative<poisson_delta>(raw))
      values.push_back(sample_param({spec.initial.base(), delta_distribution::poisson(60)}, rng));
    else
      values.push_back(sample_param(spec.initial, rng));
  }
  return configuration(cat, std::move(values));
}

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

adapter_config eva_adapter() {
  adapter_config cfg;
  cfg.command_template = "sh " + fixture("fake_eva.sh") + " {program} {args}";
  cfg.alarm_pattern = R"(^\[eva:alarm\] ([^:]+):([0-9]*): Warning: (.*)$)";
  cfg.hash_captures = {3};
  return cfg;
}

} // namespace

TEST(SyntheticProfile, ParsesAlarmsCostsAndTwists) {
  const auto cat = default_catalog();
  const auto p = parse_synthetic_profile(std::string(slevel_profile) +
                                             "[twist.t]\nalarm = small\n"
                                             "parameter = partition-history\nthreshold = 2\n",
                                         cat);
  ASSERT_EQ(p.alarms.size(), 4u);
  EXPECT_EQ(p.alarms[0].id, "small");
  EXPECT_EQ(p.alarms[0].requirement->value(4), lattice_value::integer(9));
  EXPECT_FALSE(p.alarms[3].requirement);
  EXPECT_EQ(p.cost_weights[4], 0.5);
  EXPECT_EQ(p.base_cost, 1.0);
  ASSERT_EQ(p.twists.size(), 1u);
  EXPECT_EQ(p.twists[0].param, 3u);
  EXPECT_FALSE(p.monotone());
}

TEST(SyntheticProfile, RejectsBadInput) {
  const auto cat = default_catalog();
  EXPECT_THROW(parse_synthetic_profile("[alarm.a]\nno-such = 1\n", cat), parse_error);
  EXPECT_THROW(parse_synthetic_profile("[alarm.a]\nslevel = x\n", cat), parse_error);
  EXPECT_THROW(parse_synthetic_profile("base_cost = 0\n", cat), parse_error);
  EXPECT_THROW(parse_synthetic_profile("[weird]\n", cat), parse_error);
  EXPECT_THROW(parse_synthetic_profile("[alarm.a]\nincompressible = true\nslevel = 1\n", cat),
               parse_error);
  EXPECT_THROW(parse_synthetic_profile(
                   "[twist.t]\nalarm = ghost\nparameter = slevel\nthreshold = 1\n", cat),
               parse_error);
}

TEST(SyntheticAnalyzer, AlarmsFollowRequirements) {
  const auto cat = default_catalog();
  const auto p = parse_synthetic_profile(slevel_profile, cat);
  auto c = initial_base_configuration(cat);
  EXPECT_EQ(synthetic_alarms(p, c),
            (std::vector<alarm_id>{"large", "real", "relational", "small"}));
  c = c.with(4, lattice_value::integer(9));
  EXPECT_EQ(synthetic_alarms(p, c), (std::vector<alarm_id>{"large", "real", "relational"}));
  c = c.with(4, lattice_value::integer(104));
  c = c.with(12, parse_literal(lattice_kind::bits(5), "11100"));
  EXPECT_EQ(synthetic_alarms(p, c), (std::vector<alarm_id>{"real"}));
}

TEST(SyntheticAnalyzer, CostIsLinearInPrecision) {
  const auto cat = default_catalog();
  const auto p = parse_synthetic_profile(slevel_profile, cat);
  auto c = initial_base_configuration(cat).with(4, lattice_value::integer(10));
  c = c.with(12, parse_literal(lattice_kind::bits(5), "11100"));
  EXPECT_DOUBLE_EQ(synthetic_cost(p, c), 1 + 0.5 * 10 + 2 * 3);
  EXPECT_EQ(precision_contribution(lattice_value::boolean(true)), 1.0);
  EXPECT_EQ(precision_contribution(lattice_value::boolean(false)), 0.0);
}

TEST(SyntheticAnalyzer, DeadlineDecidesOutcome) {
  const auto cat = default_catalog();
  synthetic_analyzer a(parse_synthetic_profile(slevel_profile, cat));
  const auto c = initial_base_configuration(cat).with(4, lattice_value::integer(100));
  // cost = 1 + 50 + 2 for the single cvalues domain
  const auto ok = a.run({"p", c, 60.0});
  ASSERT_TRUE(is_completed(ok));
  EXPECT_DOUBLE_EQ(outcome_wall_time(ok), 53.0);
  const auto late = a.run({"p", c, 52.0});
  ASSERT_TRUE(std::holds_alternative<timed_out>(late));
  EXPECT_DOUBLE_EQ(outcome_wall_time(late), 52.0);
  EXPECT_TRUE(a.uses_virtual_clock());
}

TEST(SyntheticAnalyzer, MonotoneWithoutTwists) {
  const auto cat = default_catalog();
  const auto p = parse_synthetic_profile(slevel_profile, cat);
  random_stream rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto c1 = random_config(cat, rng);
    const auto c2 = config_join(c1, random_config(cat, rng));
    ASSERT_TRUE(config_leq(c1, c2));
    const auto a1 = synthetic_alarms(p, c1);
    const auto a2 = synthetic_alarms(p, c2);
    ASSERT_TRUE(std::includes(a1.begin(), a1.end(), a2.begin(), a2.end()));
  }
}

TEST(SyntheticAnalyzer, TwistsBreakMonotonicity) {
  const auto cat = default_catalog();
  const auto p = parse_synthetic_profile(
      std::string(slevel_profile) +
          "[twist.t]\nalarm = small\nparameter = partition-history\nthreshold = 2\n",
      cat);
  const auto low = initial_base_configuration(cat).with(4, lattice_value::integer(9));
  const auto high = low.with(3, lattice_value::integer(3));
  ASSERT_TRUE(config_leq(low, high));
  const auto a_low = synthetic_alarms(p, low);
  const auto a_high = synthetic_alarms(p, high);
  EXPECT_EQ(std::count(a_low.begin(), a_low.end(), "small"), 0);
  EXPECT_EQ(std::count(a_high.begin(), a_high.end(), "small"), 1);
}

TEST(SyntheticAnalyzer, Deterministic) {
  const auto cat = default_catalog();
  synthetic_analyzer a(parse_synthetic_profile(slevel_profile, cat));
  random_stream rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto c = random_config(cat, rng);
    ASSERT_EQ(a.run({"p", c, 100.0}), a.run({"p", c, 100.0}));
  }
}

TEST(SyntheticOracle, JoinsRequirements) {
  const auto cat = default_catalog();
  auto least = synthetic_oracle_least_config(parse_synthetic_profile(slevel_profile, cat));
  EXPECT_EQ(least.value(4), lattice_value::integer(104));
  EXPECT_EQ(to_literal(least.value(12)), "01100");
  EXPECT_EQ(least.value(0), lattice_value::integer(0));

  EXPECT_EQ(synthetic_oracle_least_config(parse_synthetic_profile("", cat)),
            bottom_configuration(cat));
  EXPECT_THROW(synthetic_oracle_least_config(parse_synthetic_profile("[alarm.x]\nslevel = inf\n", cat)),
               unbounded_requirement);
}

TEST(SyntheticOracle, IsTheLeastSuppressingConfigurationOnSmallSpaces) {
  // Exhaustive check over a two-parameter catalog with small values.
  const auto full = default_catalog();
  const catalog cat({full[0], full[4]});
  const auto p = parse_synthetic_profile(
      "[alarm.a]\nslevel = 5\n[alarm.b]\nmin-loop-unroll = 3\nslevel = 2\n", cat);
  const auto least = synthetic_oracle_least_config(p);
  for (std::uint64_t u = 0; u <= 8; ++u)
    for (std::uint64_t s = 0; s <= 8; ++s) {
      const configuration c(cat, {lattice_value::integer(u), lattice_value::integer(s)});
      const bool clean = synthetic_alarms(p, c).empty();
      ASSERT_EQ(clean, config_leq(least, c)) << u << "," << s;
    }
}

TEST(Extraction, JoinsCapturesAndHashesTheMessage) {
  const auto cfg = eva_adapter();
  const auto r = extract_alarms("[eva:alarm] a.c:3: Warning: division by zero\n"
                                "[eva:alarm] a.c:3: Warning: division by zero\n"
                                "[kernel] noise\n",
                                cfg);
  ASSERT_EQ(r.alarms.size(), 1u);
  EXPECT_EQ(r.alarms[0], "a.c:3:" + fnv1a_hex("division by zero"));
  EXPECT_EQ(r.anomalies, 0u);
}

TEST(Extraction, EmptyCaptureIsAnAnomaly) {
  const auto r = extract_alarms("[eva:alarm] a.c:: Warning: lost\n", eva_adapter());
  EXPECT_TRUE(r.alarms.empty());
  EXPECT_EQ(r.anomalies, 1u);
}

TEST(Extraction, WholeMatchWithoutGroups) {
  adapter_config cfg;
  cfg.alarm_pattern = "ALARM-[0-9]+";
  const auto r = extract_alarms("x ALARM-2 y\nALARM-1\n", cfg);
  EXPECT_EQ(r.alarms, (std::vector<alarm_id>{"ALARM-1", "ALARM-2"}));
}

TEST(Helpers, QuotingAndHashing) {
  EXPECT_EQ(shell_quote("a b"), "'a b'");
  EXPECT_EQ(shell_quote("it's"), "'it'\\''s'");
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Subprocess, CompletedRunReportsNormalizedAlarms) {
  const auto cat = default_catalog();
  subprocess_analyzer a(cat, eva_adapter());
  EXPECT_FALSE(a.unavailable_reason());
  const auto out = a.run({"prog.c", initial_base_configuration(cat), 10.0});
  ASSERT_TRUE(is_completed(out)) << std::get_if<crashed>(&out)->exit_info;
  const auto &alarms = std::get<completed>(out).alarms;
  ASSERT_EQ(alarms.size(), 2u);
  EXPECT_EQ(alarms[0], "main.c:12:" + fnv1a_hex("out of bounds read. assert \\valid_read(p + i);"));
  EXPECT_TRUE(alarms[1].starts_with("main.c:30:"));
}

TEST(Subprocess, ArgumentsAreRenderedAndQuoted) {
  const auto cat = default_catalog();
  adapter_config cfg;
  cfg.command_template = "printf 'ARG %s\\n' {program} {args}";
  cfg.alarm_pattern = "^ARG (.*)$";
  const auto out = run_subprocess(
      {"my prog.c", initial_base_configuration(cat).with(4, lattice_value::integer(7)), 10.0},
      cat, cfg);
  ASSERT_TRUE(is_completed(out));
  const auto &alarms = std::get<completed>(out).alarms;
  EXPECT_NE(std::find(alarms.begin(), alarms.end(), "my prog.c"), alarms.end());
  EXPECT_NE(std::find(alarms.begin(), alarms.end(), "-eva-slevel"), alarms.end());
  EXPECT_NE(std::find(alarms.begin(), alarms.end(), "7"), alarms.end());
}

TEST(Subprocess, NonZeroExitIsCrashed) {
  const auto cat = default_catalog();
  adapter_config cfg;
  cfg.command_template = "echo partial; exit 3";
  cfg.alarm_pattern = "partial";
  const auto out = run_subprocess({"p", initial_base_configuration(cat), 10.0}, cat, cfg);
  ASSERT_TRUE(std::holds_alternative<crashed>(out));
  EXPECT_EQ(std::get<crashed>(out).exit_info, "exit status 3");
}

TEST(Subprocess, DeadlineKillsTheProcessGroup) {
  const auto cat = default_catalog();
  adapter_config cfg;
  cfg.command_template = "sh " + fixture("spawn_and_sleep.sh");
  cfg.alarm_pattern = "never";
  const auto start = std::chrono::steady_clock::now();
  const auto out = run_subprocess({"p", initial_base_configuration(cat), 1.0}, cat, cfg);
  const double took = seconds(start);
  ASSERT_TRUE(std::holds_alternative<timed_out>(out));
  EXPECT_GE(took, 0.9);
  EXPECT_LE(took, 1.0 + cfg.grace);
}

TEST(Subprocess, EnvironmentPassthroughFilters) {
  const auto cat = default_catalog();
  ::setenv("TUNER_VISIBLE", "yes", 1);
  ::setenv("TUNER_HIDDEN", "yes", 1);
  adapter_config cfg;
  cfg.command_template = "echo \"V=$TUNER_VISIBLE H=$TUNER_HIDDEN\"";
  cfg.alarm_pattern = "^(V=.*)$";
  cfg.env_passthrough = {"TUNER_VISIBLE"};
  const auto out = run_subprocess({"p", initial_base_configuration(cat), 10.0}, cat, cfg);
  ASSERT_TRUE(is_completed(out));
  EXPECT_EQ(std::get<completed>(out).alarms, (std::vector<alarm_id>{"V=yes H="}));
}

TEST(Subprocess, MissingCommandIsUnavailable) {
  const auto cat = default_catalog();
  adapter_config cfg;
  cfg.alarm_pattern = "x";
  cfg.command_template = "definitely-not-a-real-analyzer -eva {args}";
  EXPECT_TRUE(subprocess_analyzer(cat, cfg).unavailable_reason());
  cfg.command_template = "/nonexistent/frama-c {args}";
  EXPECT_TRUE(subprocess_analyzer(cat, cfg).unavailable_reason());
  cfg.alarm_pattern = "(";
  EXPECT_THROW(subprocess_analyzer(cat, cfg), std::regex_error);
}

TEST(ParallelFor, RunsEveryIndexOnceAndPropagatesErrors) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 5)
                                throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}
