#include "tuner/commands.hpp"

#include "tuner/dominancy.hpp"
#include "tuner/plot.hpp"
#include "tuner/synthetic.hpp"
#include "tuner/trace.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

namespace tuner {

namespace {

namespace fs = std::filesystem;

run_config load_with_overrides(const std::string &config_path, const run_overrides &o) {
  auto cfg = load_run_config(config_path);
  auto &s = cfg.settings;
  if (o.seed)
    s.seed = *o.seed;
  if (o.budget)
    s.time_budget = *o.budget;
  if (o.samples)
    s.num_sample = *o.samples;
  if (o.processes)
    s.num_process = *o.processes;
  if (o.iterations)
    s.max_iterations = *o.iterations;
  if (o.out)
    cfg.output_dir = *o.out;
  try {
    s.validate();
  } catch (const settings_error &ex) {
    throw config_error(std::string("settings: ") + ex.what());
  }
  return cfg;
}

void prepare_output_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw config_error("field 'output_dir': cannot create '" + dir + "'");
  const auto probe = fs::path(dir) / ".write-probe";
  {
    std::ofstream f(probe);
    if (!f)
      throw config_error("field 'output_dir': '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  if (!f)
    throw std::runtime_error("cannot write '" + path.string() + "'");
}

configuration load_configuration_file(const std::string &path, const catalog &cat) {
  try {
    return parse_configuration(read_text_file(path), cat);
  } catch (const std::exception &ex) {
    throw config_error("configuration '" + path + "': " + ex.what());
  }
}

} // namespace

int cmd_tune(const std::string &config_path, const run_overrides &overrides,
             std::ostream &out, std::ostream &err) {
  run_config cfg;
  catalog cat;
  std::unique_ptr<analyzer> backend;
  try {
    cfg = load_with_overrides(config_path, overrides);
    cat = load_run_catalog(cfg);
    backend = make_analyzer(cfg, cat);
  } catch (const config_error &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  }
  if (const auto reason = backend->unavailable_reason()) {
    err << "error: analyzer unavailable: " << *reason << "\n";
    return exit_unavailable;
  }
  try {
    prepare_output_dir(cfg.output_dir);
  } catch (const config_error &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  }

  const fs::path dir(cfg.output_dir);
  try {
    trace_writer trace((dir / "trace.ndjson").string());
    const auto result = tune(cfg.program, cat, cfg.settings, *backend,
                             [&](const iteration_record &rec) { trace.append(rec, cat); });
    write_file(dir / "recommended.cfg", serialize_configuration(result.recommended_config));
    write_file(dir / "result.json", encode_result(result, cat, cfg.settings));
    const auto summary = format_summary(result, cfg.settings);
    write_file(dir / "summary.txt", summary);
    out << summary;
  } catch (const std::exception &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_failure;
  }
  return exit_ok;
}

int cmd_dominancy(const std::string &config_path, const std::string &low_path,
                  const std::string &high_path, const run_overrides &overrides,
                  std::ostream &out, std::ostream &err) {
  run_config cfg;
  catalog cat;
  std::unique_ptr<analyzer> backend;
  configuration low, high;
  try {
    cfg = load_with_overrides(config_path, overrides);
    cat = load_run_catalog(cfg);
    backend = make_analyzer(cfg, cat);
    low = low_path.empty() ? initial_base_configuration(cat)
                           : load_configuration_file(low_path, cat);
    if (high_path.empty())
      throw config_error("a high-precision baseline configuration is required");
    high = load_configuration_file(high_path, cat);
  } catch (const config_error &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  }
  if (const auto reason = backend->unavailable_reason()) {
    err << "error: analyzer unavailable: " << *reason << "\n";
    return exit_unavailable;
  }
  try {
    prepare_output_dir(cfg.output_dir);
  } catch (const config_error &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  }

  try {
    const auto report = run_dominancy(cfg.program, low, high, cat, *backend,
                                      cfg.dominancy_timeout, cfg.settings.num_process);
    const auto table = format_dominancy_table(report);
    const fs::path dir(cfg.output_dir);
    write_file(dir / "dominancy.tsv", table);
    write_file(dir / "dominancy.json", encode_dominancy_report(report));
    out << "low baseline: " << report.alarms_low << " alarm(s), high baseline: "
        << report.alarms_high << " alarm(s)\n"
        << table;
  } catch (const baselines_do_not_separate &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  } catch (const std::exception &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_failure;
  }
  return exit_ok;
}

int cmd_plot(const std::string &trace_path, const std::string &out_dir,
             std::ostream &out, std::ostream &err) {
  trace_contents trace;
  try {
    trace = read_trace(trace_path);
  } catch (const trace_error &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  }
  try {
    prepare_output_dir(out_dir);
    const auto files = render_trace_charts(trace);
    for (const auto &f : files)
      write_file(fs::path(out_dir) / f.name, f.content);
    out << "wrote " << files.size() << " chart(s) to " << out_dir << "\n";
  } catch (const config_error &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  } catch (const std::exception &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_failure;
  }
  return exit_ok;
}

int cmd_simulate(const std::string &config_path, const std::string &config_file,
                 std::ostream &out, std::ostream &err) {
  try {
    const auto cfg = load_run_config(config_path);
    if (cfg.backend != backend_kind::synthetic)
      throw config_error("simulate needs the synthetic backend");
    const auto cat = load_run_catalog(cfg);
    const auto profile = parse_synthetic_profile(read_text_file(cfg.program), cat);
    const auto config = config_file.empty() ? initial_base_configuration(cat)
                                            : load_configuration_file(config_file, cat);
    for (const auto &a : synthetic_alarms(profile, config))
      out << a << "\n";
    err << "alarms: " << synthetic_alarms(profile, config).size()
        << ", cost: " << synthetic_cost(profile, config) << " s\n";
  } catch (const std::exception &ex) {
    err << "error: " << ex.what() << "\n";
    return exit_config;
  }
  return exit_ok;
}

} // namespace tuner
