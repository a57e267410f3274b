#include "tuner/run_config.hpp"

#include "tuner/keytree.hpp"
#include "tuner/synthetic.hpp"

#include <charconv>
#include <filesystem>
#include <regex>
#include <set>

namespace tuner {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> known_keys = {
    ".program", ".catalog", ".output_dir",
    "settings.num_sample", "settings.num_process", "settings.time_budget",
    "settings.seed", "settings.iteration_fraction", "settings.max_iterations",
    "settings.min_slice",
    "analyzer.backend", "analyzer.virtual_clock",
    "adapter.command", "adapter.alarm_pattern", "adapter.alarm_join",
    "adapter.hash_captures", "adapter.env", "adapter.grace",
    "dominancy.timeout"};

std::string field_name(const keytree_entry &e) {
  return e.section.empty() ? e.key : e.section + "." + e.key;
}

[[noreturn]] void bad_value(const keytree_entry &e, const std::string &what) {
  throw config_error("line " + std::to_string(e.line) + ": field '" + field_name(e) +
                     "' " + what + ", got '" + e.value + "'");
}

std::uint64_t to_unsigned(const keytree_entry &e) {
  std::uint64_t v = 0;
  const auto *first = e.value.data();
  const auto *last = first + e.value.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    bad_value(e, "must be a non-negative integer");
  return v;
}

double to_real(const keytree_entry &e) {
  double v = 0;
  const auto *first = e.value.data();
  const auto *last = first + e.value.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    bad_value(e, "must be a number");
  return v;
}

bool to_bool(const keytree_entry &e) {
  if (e.value == "true")
    return true;
  if (e.value == "false")
    return false;
  bad_value(e, "must be true or false");
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty())
        out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  if (!cur.empty())
    out.push_back(cur);
  return out;
}

std::string resolve(const std::string &base_dir, const std::string &path) {
  const fs::path p(path);
  if (p.is_absolute() || base_dir.empty())
    return p.lexically_normal().string();
  return (fs::path(base_dir) / p).lexically_normal().string();
}

} // namespace

run_config parse_run_config(std::string_view text, const std::string &base_dir) {
  keytree tree;
  try {
    tree = parse_keytree(text);
  } catch (const parse_error &ex) {
    throw config_error(ex.what());
  }
  for (const auto &e : tree.entries)
    if (!known_keys.count(e.section + "." + e.key))
      throw config_error("line " + std::to_string(e.line) + ": unknown field '" +
                         field_name(e) + "'");

  run_config cfg;
  auto get = [&](std::string_view section, std::string_view key) {
    return tree.find(section, key);
  };

  const auto *program = get("", "program");
  if (!program || program->value.empty())
    throw config_error("missing required field 'program'");
  cfg.program = resolve(base_dir, program->value);
  if (const auto *e = get("", "catalog"))
    cfg.catalog_path = resolve(base_dir, e->value);
  if (const auto *e = get("", "output_dir"))
    cfg.output_dir = e->value;
  cfg.output_dir = resolve(base_dir, cfg.output_dir);

  auto &s = cfg.settings;
  if (const auto *e = get("settings", "num_sample"))
    s.num_sample = to_unsigned(*e);
  if (const auto *e = get("settings", "num_process"))
    s.num_process = to_unsigned(*e);
  if (const auto *e = get("settings", "time_budget"))
    s.time_budget = to_real(*e);
  if (const auto *e = get("settings", "seed"))
    s.seed = to_unsigned(*e);
  if (const auto *e = get("settings", "iteration_fraction"))
    s.iteration_fraction = to_real(*e);
  if (const auto *e = get("settings", "max_iterations"))
    s.max_iterations = to_unsigned(*e);
  if (const auto *e = get("settings", "min_slice"))
    s.min_slice = to_real(*e);

  const bool has_adapter = !tree.in_section("adapter").empty();
  if (const auto *e = get("analyzer", "backend")) {
    if (e->value == "synthetic")
      cfg.backend = backend_kind::synthetic;
    else if (e->value == "subprocess")
      cfg.backend = backend_kind::subprocess;
    else
      bad_value(*e, "must be 'synthetic' or 'subprocess'");
  } else {
    cfg.backend = has_adapter ? backend_kind::subprocess : backend_kind::synthetic;
  }
  if (cfg.backend == backend_kind::synthetic && has_adapter)
    throw config_error("field 'analyzer.backend' is synthetic but an [adapter] block is "
                       "present; select exactly one backend");
  if (const auto *e = get("analyzer", "virtual_clock"))
    cfg.virtual_clock = to_bool(*e);

  if (cfg.backend == backend_kind::subprocess) {
    const auto *command = get("adapter", "command");
    if (!command || command->value.empty())
      throw config_error("missing required field 'adapter.command'");
    const auto *pattern = get("adapter", "alarm_pattern");
    if (!pattern || pattern->value.empty())
      throw config_error("missing required field 'adapter.alarm_pattern'");
    cfg.adapter.command_template = command->value;
    cfg.adapter.alarm_pattern = pattern->value;
    if (const auto *e = get("adapter", "alarm_join"))
      cfg.adapter.join = e->value;
    if (const auto *e = get("adapter", "hash_captures")) {
      for (const auto &item : split_list(e->value)) {
        const keytree_entry tmp{e->section, e->key, item, e->line, e->key_column,
                                e->value_column};
        const auto idx = to_unsigned(tmp);
        if (idx == 0)
          bad_value(*e, "lists 1-based capture indices");
        cfg.adapter.hash_captures.push_back(idx);
      }
    }
    if (const auto *e = get("adapter", "env"))
      cfg.adapter.env_passthrough = split_list(e->value);
    if (const auto *e = get("adapter", "grace"))
      cfg.adapter.grace = to_real(*e);
  }
  if (const auto *e = get("dominancy", "timeout")) {
    cfg.dominancy_timeout = to_real(*e);
    if (!(cfg.dominancy_timeout > 0))
      bad_value(*e, "must be positive");
  }

  try {
    s.validate();
  } catch (const settings_error &ex) {
    throw config_error(std::string("settings: ") + ex.what());
  }
  return cfg;
}

run_config load_run_config(const std::string &path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception &ex) {
    throw config_error(ex.what());
  }
  return parse_run_config(text, fs::path(path).parent_path().string());
}

catalog load_run_catalog(const run_config &cfg) {
  if (!cfg.catalog_path)
    return default_catalog();
  try {
    return load_catalog_override(read_text_file(*cfg.catalog_path), default_catalog());
  } catch (const std::exception &ex) {
    throw config_error("catalog '" + *cfg.catalog_path + "': " + ex.what());
  }
}

std::unique_ptr<analyzer> make_analyzer(const run_config &cfg, const catalog &cat) {
  if (cfg.backend == backend_kind::subprocess) {
    try {
      return std::make_unique<subprocess_analyzer>(cat, cfg.adapter);
    } catch (const std::regex_error &ex) {
      throw config_error(std::string("field 'adapter.alarm_pattern' is not a valid "
                                     "regular expression: ") + ex.what());
    }
  }
  std::string text;
  try {
    text = read_text_file(cfg.program);
  } catch (const std::exception &ex) {
    throw config_error("field 'program': " + std::string(ex.what()));
  }
  try {
    return std::make_unique<synthetic_analyzer>(parse_synthetic_profile(text, cat),
                                                cfg.virtual_clock);
  } catch (const std::exception &ex) {
    throw config_error("profile '" + cfg.program + "': " + ex.what());
  }
}

} // namespace tuner
