#include "support.hpp"

#include "tuner/commands.hpp"
#include "tuner/keytree.hpp"
#include "tuner/plot.hpp"
#include "tuner/run_config.hpp"
#include "tuner/synthetic.hpp"
#include "tuner/trace.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace tuner;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

void write(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path &p) { return read_text_file(p.string()); }

std::string profile_path() { return config_dir() + "/synthetic_slevel.profile"; }

synthetic_profile load_synthetic_profile(const std::string &path, const catalog &cat) {
  return parse_synthetic_profile(read_text_file(path), cat);
}

// A small synthetic run writing into `dir`.
std::string synthetic_run(const temp_dir &dir, const std::string &extra = "") {
  const auto path = dir.str("run.cfg");
  write(path, "program = " + profile_path() + "\noutput_dir = " + dir.str("out") +
                  "\n[settings]\nnum_sample = 4\nnum_process = 2\ntime_budget = 1000\n"
                  "seed = 7\nmax_iterations = 6\n" +
                  extra);
  return path;
}

int run_binary(const std::string &args, std::string *stdout_text = nullptr) {
  temp_dir capture("bin");
  const auto cmd = std::string(STRATEGY_TUNER_BIN) + " " + args + " >" + capture.str("o") +
                   " 2>" + capture.str("e");
  const int status = std::system(cmd.c_str());
  if (stdout_text)
    *stdout_text = slurp(capture.path() / "o");
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(RunConfig, ParsesAllSections) {
  const auto cfg = parse_run_config("program = p.c\ncatalog = cat.txt\n"
                                    "[settings]\nnum_sample = 6\nseed = 9\n"
                                    "[adapter]\ncommand = \"tool {args} {program}\"\n"
                                    "alarm_pattern = ^W: (.*)$\nhash_captures = 1\n"
                                    "[dominancy]\ntimeout = 60\n",
                                    "/base");
  EXPECT_EQ(cfg.program, "/base/p.c");
  EXPECT_EQ(cfg.catalog_path, "/base/cat.txt");
  EXPECT_EQ(cfg.settings.num_sample, 6u);
  EXPECT_EQ(cfg.settings.seed, 9u);
  EXPECT_EQ(cfg.backend, backend_kind::subprocess);
  EXPECT_EQ(cfg.adapter.command_template, "tool {args} {program}");
  EXPECT_EQ(cfg.adapter.alarm_pattern, "^W: (.*)$");
  EXPECT_EQ(cfg.dominancy_timeout, 60.0);
}

TEST(RunConfig, ErrorsNameTheField) {
  auto message = [](const std::string &text) {
    try {
      (void)parse_run_config(text, "/");
    } catch (const config_error &ex) {
      return std::string(ex.what());
    }
    return std::string();
  };
  EXPECT_NE(message("[settings]\nseed = 1\n").find("program"), std::string::npos);
  EXPECT_NE(message("program = p\n[settings]\nnum_sample = 0\n").find("num_sample"),
            std::string::npos);
  EXPECT_NE(message("program = p\n[settings]\ncolour = 1\n").find("colour"), std::string::npos);
  EXPECT_NE(message("program = p\n[analyzer]\nbackend = magic\n").find("backend"),
            std::string::npos);
  EXPECT_FALSE(message("program = p\n[analyzer]\nbackend = synthetic\n[adapter]\ncommand = x\n")
                   .empty());
}

TEST(RunConfig, BadRegexIsAConfigError) {
  const auto cfg = parse_run_config(
      "program = p.c\n[adapter]\ncommand = tool {program}\nalarm_pattern = ([unclosed\n", "/");
  EXPECT_THROW(make_analyzer(cfg, default_catalog()), config_error);
}

TEST(Trace, RecordsRoundTripLosslessly) {
  const auto cat = default_catalog();
  synthetic_analyzer a(load_synthetic_profile(profile_path(), cat));
  tuner_settings s;
  s.num_sample = 5;
  s.time_budget = 300;
  s.seed = 3;
  s.max_iterations = 5;
  const auto r = tune("p", cat, s, a);
  ASSERT_FALSE(r.iteration_trace.empty());
  for (const auto &rec : r.iteration_trace) {
    const auto line = encode_trace_record(rec, cat);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(decode_trace_record(line, cat), rec);
    EXPECT_EQ(decode_trace_record(line, catalog_from_trace_record(line)), rec);
  }
}

TEST(Trace, OutcomeKindsRoundTrip) {
  const auto cat = default_catalog();
  iteration_record rec;
  rec.index = 2;
  rec.timeout = 10;
  rec.elapsed = 7.25;
  const auto base = initial_base_configuration(cat);
  rec.sampled_configs = {base, base, base};
  rec.outcomes = {completed{{"a:1", "b:2"}, 1.5}, timed_out{10}, crashed{"signal 11", 0.5}};
  rec.alarm_universe = {"a:1", "b:2"};
  rec.completed = 1;
  rec.eta_c = 1.0 / 3;
  rec.eta = scaling_factor(1, 3);
  rec.distributions_before = initial_distributions(cat);
  rec.distributions_after = rec.distributions_before;
  EXPECT_EQ(decode_trace_record(encode_trace_record(rec, cat), cat), rec);
}

TEST(Trace, ReaderReportsBadRecords) {
  temp_dir dir("trace");
  write(dir.str("empty.ndjson"), "");
  try {
    (void)read_trace(dir.str("empty.ndjson"));
    FAIL();
  } catch (const trace_error &ex) {
    EXPECT_EQ(ex.record(), 0u);
  }

  const auto cat = default_catalog();
  synthetic_analyzer a(load_synthetic_profile(profile_path(), cat));
  tuner_settings s;
  s.time_budget = 300;
  s.max_iterations = 2;
  const auto r = tune("p", cat, s, a);
  ASSERT_EQ(r.iteration_trace.size(), 2u);
  write(dir.str("bad.ndjson"), encode_trace_record(r.iteration_trace[0], cat) + "\n{\"schema\":\n");
  try {
    (void)read_trace(dir.str("bad.ndjson"));
    FAIL();
  } catch (const trace_error &ex) {
    EXPECT_EQ(ex.record(), 1u);
    EXPECT_NE(std::string(ex.what()).find("record 1"), std::string::npos);
  }
  EXPECT_THROW((void)read_trace(dir.str("missing.ndjson")), trace_error);
}

TEST(Tune, WritesArtifactsAndAParsableRecommendation) {
  temp_dir dir("tune");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_tune(synthetic_run(dir), {}, out, err), exit_ok) << err.str();
  for (const auto *name : {"trace.ndjson", "recommended.cfg", "result.json", "summary.txt"})
    EXPECT_TRUE(fs::exists(dir.path() / "out" / name)) << name;
  const auto cat = default_catalog();
  const auto recommended = parse_configuration(slurp(dir.path() / "out/recommended.cfg"), cat);
  const auto trace = read_trace(dir.str("out/trace.ndjson"));
  EXPECT_EQ(trace.records.size(), 6u);
  EXPECT_EQ(recommended, base_configuration(cat, trace.records.back().distributions_after));
  const auto result = nlohmann::json::parse(slurp(dir.path() / "out/result.json"));
  EXPECT_EQ(result["schema"], "strategy-tuner/result");
  EXPECT_EQ(result["iterations"].size(), 6u);
  EXPECT_NE(out.str().find("recommended"), std::string::npos);
}

TEST(Tune, OverridesTakePrecedence) {
  temp_dir dir("override");
  std::ostringstream out, err;
  run_overrides o;
  o.iterations = 2;
  o.out = dir.str("elsewhere");
  ASSERT_EQ(cmd_tune(synthetic_run(dir), o, out, err), exit_ok) << err.str();
  EXPECT_EQ(read_trace(dir.str("elsewhere/trace.ndjson")).records.size(), 2u);
}

TEST(Tune, ConfigurationErrorsExitWithTwo) {
  temp_dir dir("badcfg");
  std::ostringstream out, err;
  write(dir.str("a.cfg"), "[settings]\nseed = 1\n");
  EXPECT_EQ(cmd_tune(dir.str("a.cfg"), {}, out, err), exit_config);
  EXPECT_NE(err.str().find("program"), std::string::npos);
  EXPECT_EQ(cmd_tune(synthetic_run(dir, "num_process = 0\n"), {}, out, err), exit_config);
  EXPECT_EQ(cmd_tune(dir.str("nope.cfg"), {}, out, err), exit_config);
  EXPECT_FALSE(fs::exists(dir.path() / "out" / "trace.ndjson"));
}

TEST(Tune, MissingAnalyzerExitsWithThreeBeforeIterating) {
  temp_dir dir("noanalyzer");
  write(dir.str("prog.c"), "int main(void) { return 0; }\n");
  write(dir.str("run.cfg"), "program = prog.c\noutput_dir = out\n"
                            "[adapter]\ncommand = /no/such/frama-c -eva {args} {program}\n"
                            "alarm_pattern = ^W: (.*)$\n");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_tune(dir.str("run.cfg"), {}, out, err), exit_unavailable);
  EXPECT_FALSE(fs::exists(dir.path() / "out" / "trace.ndjson"));
}

TEST(Dominancy, WritesTableAndRejectsEqualBaselines) {
  temp_dir dir("dominancy");
  const auto cfg = synthetic_run(dir);
  write(dir.str("high.cfg"), "slevel = 200\nplevel = 40\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_dominancy(cfg, "", dir.str("high.cfg"), {}, out, err), exit_ok) << err.str();
  const auto table = slurp(dir.path() / "out/dominancy.tsv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 14);
  EXPECT_NE(table.find("slevel\t2\t2\t2\t1.000\tyes"), std::string::npos) << table;
  EXPECT_TRUE(fs::exists(dir.path() / "out/dominancy.json"));

  write(dir.str("same.cfg"), "slevel = 0\n");
  EXPECT_EQ(cmd_dominancy(cfg, "", dir.str("same.cfg"), {}, out, err), exit_config);
  EXPECT_NE(err.str().find("baselines do not separate"), std::string::npos);
}

TEST(Plot, OneChartPerParameterAndDeterministic) {
  temp_dir dir("plot");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_tune(synthetic_run(dir), {}, out, err), exit_ok) << err.str();
  const auto trace = dir.str("out/trace.ndjson");
  ASSERT_EQ(cmd_plot(trace, dir.str("p1"), out, err), exit_ok) << err.str();
  ASSERT_EQ(cmd_plot(trace, dir.str("p2"), out, err), exit_ok) << err.str();
  std::size_t files = 0;
  for (const auto &entry : fs::directory_iterator(dir.path() / "p1")) {
    ++files;
    const auto other = dir.path() / "p2" / entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path();
    EXPECT_NE(slurp(entry.path()).find("<svg"), std::string::npos);
  }
  EXPECT_EQ(files, 14u);
  EXPECT_TRUE(fs::exists(dir.path() / "p1/param-slevel.svg"));
  EXPECT_TRUE(fs::exists(dir.path() / "p1/alarms.svg"));

  write(dir.str("empty.ndjson"), "");
  EXPECT_EQ(cmd_plot(dir.str("empty.ndjson"), dir.str("p3"), out, err), exit_config);
}

TEST(Simulate, PrintsTheAlarmSet) {
  temp_dir dir("simulate");
  const auto cfg = synthetic_run(dir);
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate(cfg, "", out, err), exit_ok) << err.str();
  const auto profile = load_synthetic_profile(profile_path(), default_catalog());
  const auto expected =
      synthetic_alarms(profile, initial_base_configuration(default_catalog()));
  std::string text;
  for (const auto &a : expected)
    text += a + "\n";
  EXPECT_EQ(out.str(), text);

  write(dir.str("high.cfg"), "slevel = 200\n");
  std::ostringstream out2;
  ASSERT_EQ(cmd_simulate(cfg, dir.str("high.cfg"), out2, err), exit_ok);
  EXPECT_LT(out2.str().size(), out.str().size());
}

TEST(Binary, SubcommandsAndExitCodes) {
  temp_dir dir("binary");
  const auto cfg = synthetic_run(dir);
  std::string text;
  EXPECT_EQ(run_binary("--help", &text), 0);
  EXPECT_NE(text.find("tune"), std::string::npos);
  EXPECT_EQ(run_binary("tune --config " + cfg + " --iterations 3"), 0);
  EXPECT_EQ(read_trace(dir.str("out/trace.ndjson")).records.size(), 3u);
  EXPECT_EQ(run_binary("plot --trace " + dir.str("out/trace.ndjson") + " --out " +
                       dir.str("plots")),
            0);
  EXPECT_TRUE(fs::exists(dir.path() / "plots/alarms.svg"));
  EXPECT_EQ(run_binary("simulate --config " + cfg, &text), 0);
  EXPECT_FALSE(text.empty());
  EXPECT_EQ(run_binary("tune"), 2);
  EXPECT_EQ(run_binary("frobnicate"), 2);
}

TEST(RunConfig, ShippedConfigurationsLoad) {
  std::size_t loaded = 0;
  for (const auto &entry : fs::directory_iterator(config_dir())) {
    if (entry.path().extension() != ".run")
      continue;
    const auto cfg = load_run_config(entry.path().string());
    EXPECT_NO_THROW((void)make_analyzer(cfg, load_run_catalog(cfg))) << entry.path();
    ++loaded;
  }
  EXPECT_EQ(loaded, 3u);
}
