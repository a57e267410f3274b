#include "tuner/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <sstream>

namespace tuner {

using json = nlohmann::ordered_json;

namespace {

json encode_config(const configuration &config) {
  json obj = json::object();
  for (std::size_t i = 0; i < config.size(); ++i)
    obj[config.name(i)] = to_literal(config.value(i));
  return obj;
}

configuration decode_config(const json &obj, const catalog &cat) {
  if (!obj.is_object() || obj.size() != cat.size())
    throw std::invalid_argument("configuration must list every parameter once");
  std::vector<lattice_value> values;
  for (const auto &spec : cat)
    values.push_back(parse_literal(spec.kind, obj.at(spec.name).get<std::string>()));
  return configuration(cat, std::move(values));
}

json encode_outcome(const analysis_outcome &o) {
  json obj;
  if (const auto *c = std::get_if<completed>(&o)) {
    obj["status"] = "completed";
    obj["alarms"] = c->alarms;
    obj["wall_time"] = c->wall_time;
  } else if (const auto *t = std::get_if<timed_out>(&o)) {
    obj["status"] = "timed_out";
    obj["wall_time"] = t->wall_time;
  } else {
    const auto &x = std::get<crashed>(o);
    obj["status"] = "crashed";
    obj["exit_info"] = x.exit_info;
    obj["wall_time"] = x.wall_time;
  }
  return obj;
}

analysis_outcome decode_outcome(const json &obj) {
  const auto status = obj.at("status").get<std::string>();
  const double wall = obj.at("wall_time").get<double>();
  if (status == "completed")
    return completed{obj.at("alarms").get<std::vector<alarm_id>>(), wall};
  if (status == "timed_out")
    return timed_out{wall};
  if (status == "crashed")
    return crashed{obj.at("exit_info").get<std::string>(), wall};
  throw std::invalid_argument("unknown outcome status '" + status + "'");
}

json encode_distributions(const std::vector<param_distribution> &dists,
                          const catalog &cat) {
  json arr = json::array();
  for (std::size_t i = 0; i < dists.size(); ++i)
    arr.push_back({{"name", cat[i].name},
                   {"base", to_literal(dists[i].base())},
                   {"delta", to_text(dists[i].delta())}});
  return arr;
}

std::vector<param_distribution> decode_distributions(const json &arr, const catalog &cat) {
  if (!arr.is_array() || arr.size() != cat.size())
    throw std::invalid_argument("distributions must list every parameter once");
  std::vector<param_distribution> out;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto &d = arr[i];
    if (d.at("name").get<std::string>() != cat[i].name)
      throw std::invalid_argument("distribution " + std::to_string(i) + " is not '" +
                                  cat[i].name + "'");
    out.emplace_back(parse_literal(cat[i].kind, d.at("base").get<std::string>()),
                     parse_delta(d.at("delta").get<std::string>()));
  }
  return out;
}

json encode_parameters(const catalog &cat) {
  json arr = json::array();
  for (const auto &spec : cat)
    arr.push_back({spec.name, spec.kind.to_string()});
  return arr;
}

void check_header(const json &obj) {
  if (!obj.is_object())
    throw std::invalid_argument("record is not a JSON object");
  if (obj.value("schema", std::string()) != trace_schema)
    throw std::invalid_argument("missing or unknown schema");
  if (obj.value("version", 0) != trace_version)
    throw std::invalid_argument("unsupported trace version");
}

std::string format_real(double x, int digits) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return std::string(buf, end);
}

} // namespace

trace_error::trace_error(std::size_t record, const std::string &message)
    : std::runtime_error("trace record " + std::to_string(record) + ": " + message),
      record_(record) {}

std::string encode_trace_record(const iteration_record &rec, const catalog &cat) {
  json obj;
  obj["schema"] = trace_schema;
  obj["version"] = trace_version;
  obj["index"] = rec.index;
  obj["timeout"] = rec.timeout;
  obj["elapsed"] = rec.elapsed;
  obj["parameters"] = encode_parameters(cat);
  json configs = json::array();
  for (const auto &c : rec.sampled_configs)
    configs.push_back(encode_config(c));
  obj["sampled_configs"] = std::move(configs);
  json outcomes = json::array();
  for (const auto &o : rec.outcomes)
    outcomes.push_back(encode_outcome(o));
  obj["outcomes"] = std::move(outcomes);
  obj["alarm_universe"] = rec.alarm_universe;
  obj["completed"] = rec.completed;
  obj["eta_c"] = rec.eta_c;
  obj["eta"] = rec.eta;
  obj["distributions_before"] = encode_distributions(rec.distributions_before, cat);
  obj["distributions_after"] = encode_distributions(rec.distributions_after, cat);
  return obj.dump();
}

iteration_record decode_trace_record(std::string_view line, const catalog &cat) {
  const auto obj = json::parse(line);
  check_header(obj);
  if (obj.at("parameters") != encode_parameters(cat))
    throw std::invalid_argument("parameter list differs from the first record");

  iteration_record rec;
  rec.index = obj.at("index").get<std::size_t>();
  rec.timeout = obj.at("timeout").get<double>();
  rec.elapsed = obj.at("elapsed").get<double>();
  for (const auto &c : obj.at("sampled_configs"))
    rec.sampled_configs.push_back(decode_config(c, cat));
  for (const auto &o : obj.at("outcomes"))
    rec.outcomes.push_back(decode_outcome(o));
  if (rec.outcomes.size() != rec.sampled_configs.size())
    throw std::invalid_argument("outcomes and sampled_configs differ in length");
  rec.alarm_universe = obj.at("alarm_universe").get<std::vector<alarm_id>>();
  rec.completed = obj.at("completed").get<std::size_t>();
  rec.eta_c = obj.at("eta_c").get<double>();
  rec.eta = obj.at("eta").get<double>();
  rec.distributions_before = decode_distributions(obj.at("distributions_before"), cat);
  rec.distributions_after = decode_distributions(obj.at("distributions_after"), cat);
  return rec;
}

catalog catalog_from_trace_record(std::string_view line) {
  const auto obj = json::parse(line);
  check_header(obj);
  std::vector<param_spec> specs;
  for (const auto &p : obj.at("parameters")) {
    const auto name = p.at(0).get<std::string>();
    const auto kind = parse_kind(p.at(1).get<std::string>());
    render_rule rule = int_render{};
    auto delta = delta_distribution::poisson(0);
    if (kind.tag == lattice_tag::boolean) {
      rule = bool_render{};
      delta = delta_distribution::bernoulli(0);
    } else if (kind.tag == lattice_tag::bits) {
      bits_render br;
      for (unsigned b = 0; b < kind.width; ++b)
        br.labels.push_back(std::to_string(b));
      rule = br;
      delta = delta_distribution::bernoulli_vector(std::vector<double>(kind.width, 0.0));
    }
    const param_distribution initial(bottom(kind), delta);
    specs.push_back({name, kind, initial, rule});
  }
  return catalog(std::move(specs));
}

trace_writer::trace_writer(const std::string &path) : out_(path, std::ios::trunc) {
  if (!out_)
    throw std::runtime_error("cannot open trace file '" + path + "'");
}

void trace_writer::append(const iteration_record &rec, const catalog &cat) {
  out_ << encode_trace_record(rec, cat) << '\n';
  out_.flush();
  if (!out_)
    throw std::runtime_error("failed to write trace record");
}

trace_contents read_trace(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw trace_error(0, "cannot open '" + path + "'");
  trace_contents contents;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    try {
      if (index == 0)
        contents.cat = catalog_from_trace_record(line);
      contents.records.push_back(decode_trace_record(line, contents.cat));
    } catch (const std::exception &ex) {
      throw trace_error(index, ex.what());
    }
    ++index;
  }
  if (contents.records.empty())
    throw trace_error(0, "trace is empty");
  return contents;
}

std::string encode_result(const tune_result &result, const catalog &cat,
                          const tuner_settings &settings) {
  json obj;
  obj["schema"] = "strategy-tuner/result";
  obj["version"] = 1;
  obj["recommended_config"] = encode_config(result.recommended_config);
  if (result.best_sampled) {
    obj["best_sampled"] = {{"config", encode_config(result.best_sampled->config)},
                           {"iteration", result.best_sampled->iteration},
                           {"alarm_count", result.best_sampled->alarm_count()},
                           {"alarms", result.best_sampled->alarms}};
  } else {
    obj["best_sampled"] = nullptr;
  }
  obj["final_distributions"] = encode_distributions(result.final_distributions, cat);
  json rounds = json::array();
  for (const auto &rec : result.iteration_trace) {
    json best = nullptr;
    for (const auto &o : rec.outcomes)
      if (const auto *c = std::get_if<completed>(&o))
        if (best.is_null() || c->alarms.size() < best.get<std::size_t>())
          best = c->alarms.size();
    rounds.push_back({{"index", rec.index},
                      {"completed", rec.completed},
                      {"best_alarm_count", best},
                      {"eta", rec.eta}});
  }
  obj["iterations"] = std::move(rounds);
  obj["settings"] = {{"num_sample", settings.num_sample},
                     {"num_process", settings.num_process},
                     {"time_budget", settings.time_budget},
                     {"seed", settings.seed},
                     {"iteration_fraction", settings.iteration_fraction}};
  obj["wall_time_total"] = result.wall_time_total;
  return obj.dump(2) + "\n";
}

std::string format_summary(const tune_result &result, const tuner_settings &settings) {
  std::ostringstream out;
  out << "iterations: " << result.iteration_trace.size() << "\n";
  out << "samples per iteration: " << settings.num_sample
      << ", workers: " << settings.num_process << ", seed: " << settings.seed << "\n";
  out << "time used: " << format_real(result.wall_time_total, 3) << " s of "
      << format_real(settings.time_budget, 3) << " s\n\n";
  out << "recommended configuration (final base):\n";
  const auto &rc = result.recommended_config;
  for (std::size_t i = 0; i < rc.size(); ++i)
    out << "  " << rc.name(i) << " = " << to_literal(rc.value(i)) << "\n";
  out << "\n";
  if (result.best_sampled) {
    const auto &b = *result.best_sampled;
    out << "best sampled configuration: iteration " << b.iteration << ", "
        << b.alarm_count() << " alarm(s)\n";
    for (std::size_t i = 0; i < b.config.size(); ++i)
      if (!(b.config.value(i) == rc.value(i)))
        out << "  " << b.config.name(i) << " = " << to_literal(b.config.value(i))
            << "  (recommended " << to_literal(rc.value(i)) << ")\n";
  } else {
    out << "no analysis completed\n";
  }
  out << "\nper iteration: index, completed, eta, best alarm count\n";
  for (const auto &rec : result.iteration_trace) {
    std::size_t best = 0;
    bool any = false;
    for (const auto &o : rec.outcomes)
      if (const auto *c = std::get_if<completed>(&o)) {
        best = any ? std::min(best, c->alarms.size()) : c->alarms.size();
        any = true;
      }
    out << "  " << rec.index << "  " << rec.completed << "/" << rec.outcomes.size() << "  "
        << format_real(rec.eta, 4) << "  " << (any ? std::to_string(best) : "-") << "\n";
  }
  return out.str();
}

std::string encode_dominancy_report(const dominancy_report &report) {
  json obj;
  obj["schema"] = "strategy-tuner/dominancy";
  obj["version"] = 1;
  obj["alarms_low"] = report.alarms_low;
  obj["alarms_high"] = report.alarms_high;
  obj["d"] = report.d();
  obj["invocations"] = report.invocations;
  json rows = json::array();
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const auto &p = report.pairs[i];
    json row;
    row["parameter"] = p.param_name;
    row["alarms_selected"] = p.alarms_selected ? json(*p.alarms_selected) : json(nullptr);
    row["alarms_excluded"] = p.alarms_excluded ? json(*p.alarms_excluded) : json(nullptr);
    row["score"] = report.scores[i] ? json(*report.scores[i]) : json("unavailable");
    row["dominant"] = report.dominant == i;
    rows.push_back(std::move(row));
  }
  obj["parameters"] = std::move(rows);
  obj["dominant"] = report.dominant ? json(report.pairs[*report.dominant].param_name)
                                    : json(nullptr);
  obj["dominant_tied"] = report.dominant_tied;
  return obj.dump(2) + "\n";
}

} // namespace tuner
