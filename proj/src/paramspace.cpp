#include "tuner/paramspace.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tuner {

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok)
    out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  while (true) {
    const auto pos = s.find(sep);
    out.emplace_back(s.substr(0, pos));
    if (pos == std::string_view::npos)
      break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

void replace_all(std::string &s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos;
       pos += to.size())
    s.replace(pos, from.size(), to);
}

} // namespace

lattice_kind parse_kind(std::string_view text) {
  if (text == "int")
    return lattice_kind::integer();
  if (text == "bool")
    return lattice_kind::boolean();
  if (text.starts_with("bits(") && text.ends_with(")")) {
    const auto inner = text.substr(5, text.size() - 6);
    const auto width = parse_literal(lattice_kind::integer(), inner);
    if (width.as_int().is_infinite() || width.as_int().value() > bits_val::max_width)
      throw literal_error("bit-vector width out of range");
    return lattice_kind::bits(static_cast<unsigned>(width.as_int().value()));
  }
  throw literal_error("expected kind 'int', 'bool' or 'bits(c)', got '" +
                      std::string(text) + "'");
}

namespace {

bool rule_matches(const render_rule &rule, lattice_kind kind) {
  switch (kind.tag) {
  case lattice_tag::integer:
    return std::holds_alternative<int_render>(rule);
  case lattice_tag::boolean:
    return std::holds_alternative<bool_render>(rule);
  case lattice_tag::bits:
    return std::holds_alternative<bits_render>(rule) &&
           std::get<bits_render>(rule).labels.size() == kind.width;
  }
  return false;
}

param_spec int_param(const char *name, std::uint64_t base, double lambda) {
  return {name, lattice_kind::integer(),
          param_distribution(lattice_value::integer(base),
                             delta_distribution::poisson(lambda)),
          int_render{}};
}

param_spec bool_param(const char *name, std::vector<std::string> when_false,
                      std::vector<std::string> when_true) {
  return {name, lattice_kind::boolean(),
          param_distribution(lattice_value::boolean(false),
                             delta_distribution::bernoulli(0.5)),
          bool_render{std::move(when_false), std::move(when_true)}};
}

render_rule default_rule(const std::string &name, lattice_kind kind) {
  switch (kind.tag) {
  case lattice_tag::integer:
    return int_render{};
  case lattice_tag::boolean:
    return bool_render{{"-eva-no-" + name}, {"-eva-" + name}};
  case lattice_tag::bits:
    return bits_render{"-eva-" + name, {}, ","};
  }
  return int_render{};
}

} // namespace

catalog::catalog(std::vector<param_spec> specs) : specs_(std::move(specs)) {
  std::set<std::string> seen;
  for (const auto &s : specs_) {
    if (s.name.empty())
      throw std::invalid_argument("parameter name must not be empty");
    if (!seen.insert(s.name).second)
      throw std::invalid_argument("duplicate parameter '" + s.name + "'");
    if (s.initial.base().kind() != s.kind)
      throw std::invalid_argument("initial distribution of '" + s.name +
                                  "' does not match kind " + s.kind.to_string());
    if (!rule_matches(s.render, s.kind))
      throw std::invalid_argument("rendering rule of '" + s.name +
                                  "' does not match kind " + s.kind.to_string());
  }
}

std::optional<std::size_t> catalog::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].name == name)
      return i;
  return std::nullopt;
}

catalog default_catalog() {
  std::vector<param_spec> specs;
  specs.push_back(int_param("min-loop-unroll", 0, 0.4));
  specs.push_back(int_param("auto-loop-unroll", 0, 10));
  specs.push_back(int_param("widening-delay", 1, 0.5));
  specs.push_back(int_param("partition-history", 0, 0.4));
  specs.push_back(int_param("slevel", 0, 20));
  specs.push_back(int_param("ilevel", 8, 2));
  specs.push_back(int_param("plevel", 10, 10));
  specs.push_back(int_param("subdivide-non-linear", 0, 2.5));
  specs.push_back(bool_param("split-return", {}, {"-eva-split-return", "auto"}));
  specs.push_back(bool_param("remove-redundant-alarms",
                             {"-eva-no-remove-redundant-alarms"},
                             {"-eva-remove-redundant-alarms"}));
  specs.push_back(bool_param("octagon-through-calls",
                             {"-eva-no-octagon-through-calls"},
                             {"-eva-octagon-through-calls"}));
  specs.push_back(bool_param("equality-through-calls",
                             {"-eva-equality-through-calls", "none"},
                             {"-eva-equality-through-calls", "formals"}));
  specs.push_back({"domains", lattice_kind::bits(5),
                   param_distribution(lattice_value::bits(5, 0b00001),
                                      delta_distribution::bernoulli_vector(
                                          {0.5, 0.5, 0.5, 0.5, 0.5})),
                   bits_render{"-eva-domains",
                               {"cvalues", "octagon", "equality", "gauges",
                                "symbolic-locations"},
                               ","}});
  return catalog(std::move(specs));
}

catalog load_catalog_override(std::string_view text, const catalog &base) {
  const auto tree = parse_keytree(text);
  std::vector<param_spec> specs = base.specs();

  for (const auto *e : tree.in_section(""))
    throw parse_error(e->line, e->key_column,
                      "catalog entries must appear under a [parameter] section");

  for (const auto &section : tree.sections) {
    const auto entries = tree.in_section(section);
    auto it = std::find_if(specs.begin(), specs.end(),
                           [&](const param_spec &s) { return s.name == section; });
    const keytree_entry *kind_entry = tree.find(section, "kind");
    if (it == specs.end()) {
      if (!kind_entry)
        throw parse_error(entries.empty() ? 1 : entries.front()->line, 1,
                          "new parameter '" + section + "' needs a 'kind'");
      lattice_kind kind;
      try {
        kind = parse_kind(kind_entry->value);
      } catch (const std::exception &ex) {
        throw parse_error(kind_entry->line, kind_entry->value_column, ex.what());
      }
      auto base_value = bottom(kind);
      delta_distribution delta = kind.tag == lattice_tag::integer
                                     ? delta_distribution::poisson(1.0)
                                 : kind.tag == lattice_tag::boolean
                                     ? delta_distribution::bernoulli(0.5)
                                     : delta_distribution::bernoulli_vector(
                                           std::vector<double>(kind.width, 0.5));
      specs.push_back({section, kind, param_distribution(base_value, delta),
                       default_rule(section, kind)});
      it = specs.end() - 1;
    } else if (kind_entry) {
      lattice_kind kind;
      try {
        kind = parse_kind(kind_entry->value);
      } catch (const std::exception &ex) {
        throw parse_error(kind_entry->line, kind_entry->value_column, ex.what());
      }
      if (kind != it->kind)
        throw parse_error(kind_entry->line, kind_entry->value_column,
                          "cannot change the kind of '" + section + "'");
    }

    param_spec &spec = *it;
    std::optional<lattice_value> new_base;
    std::optional<delta_distribution> new_delta;
    const keytree_entry *base_entry = nullptr;
    for (const auto *e : entries) {
      try {
        if (e->key == "kind") {
          continue;
        } else if (e->key == "base") {
          new_base = parse_literal(spec.kind, e->value);
          base_entry = e;
        } else if (e->key == "delta") {
          new_delta = parse_delta(e->value);
        } else if (e->key == "args") {
          auto *r = std::get_if<int_render>(&spec.render);
          if (!r)
            throw literal_error("'args' applies to int parameters only");
          r->args_template = e->value;
        } else if (e->key == "when_false" || e->key == "when_true") {
          auto *r = std::get_if<bool_render>(&spec.render);
          if (!r)
            throw literal_error("'" + e->key + "' applies to bool parameters only");
          (e->key == "when_false" ? r->when_false : r->when_true) = split_ws(e->value);
        } else if (e->key == "flag" || e->key == "labels" || e->key == "separator") {
          auto *r = std::get_if<bits_render>(&spec.render);
          if (!r)
            throw literal_error("'" + e->key + "' applies to bits parameters only");
          if (e->key == "flag")
            r->flag = e->value;
          else if (e->key == "separator")
            r->separator = e->value;
          else
            r->labels = split_on(e->value, ',');
        } else {
          throw literal_error("unknown catalog key '" + e->key + "'");
        }
      } catch (const parse_error &) {
        throw;
      } catch (const std::exception &ex) {
        throw parse_error(e->line, e->value_column, ex.what());
      }
    }
    try {
      spec.initial = param_distribution(new_base.value_or(spec.initial.base()),
                                        new_delta.value_or(spec.initial.delta()));
    } catch (const std::exception &ex) {
      const auto *e = base_entry ? base_entry : entries.front();
      throw parse_error(e->line, e->value_column, ex.what());
    }
    if (!rule_matches(spec.render, spec.kind)) {
      const auto *e = tree.find(section, "labels");
      throw parse_error(e ? e->line : entries.front()->line, e ? e->value_column : 1,
                        "'" + section + "' needs exactly " +
                            std::to_string(spec.kind.width) + " labels");
    }
  }
  return catalog(std::move(specs));
}

std::string format_catalog_table(const catalog &cat) {
  std::string out;
  for (const auto &s : cat) {
    out += s.name + " | " + s.kind.to_string() + " | " + to_literal(s.initial.base()) +
           " | " + to_text(s.initial.delta()) + "\n";
  }
  return out;
}

configuration::configuration(const catalog &cat, std::vector<lattice_value> values)
    : values_(std::move(values)) {
  if (values_.size() != cat.size())
    throw std::invalid_argument("configuration has " + std::to_string(values_.size()) +
                                " values for a catalog of " +
                                std::to_string(cat.size()));
  names_.reserve(cat.size());
  for (std::size_t i = 0; i < cat.size(); ++i) {
    if (values_[i].kind() != cat[i].kind)
      throw std::invalid_argument("value for '" + cat[i].name + "' has kind " +
                                  values_[i].kind().to_string() + ", expected " +
                                  cat[i].kind.to_string());
    names_.push_back(cat[i].name);
  }
}

std::optional<std::size_t> configuration::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name)
      return i;
  return std::nullopt;
}

configuration configuration::with(std::size_t i, lattice_value v) const {
  if (v.kind() != values_.at(i).kind())
    throw lattice_mismatch("configuration::with: kind mismatch for '" + names_[i] + "'");
  configuration copy = *this;
  copy.values_[i] = std::move(v);
  return copy;
}

configuration initial_base_configuration(const catalog &cat) {
  std::vector<lattice_value> values;
  for (const auto &s : cat)
    values.push_back(s.initial.base());
  return configuration(cat, std::move(values));
}

configuration bottom_configuration(const catalog &cat) {
  std::vector<lattice_value> values;
  for (const auto &s : cat)
    values.push_back(bottom(s.kind));
  return configuration(cat, std::move(values));
}

bool config_leq(const configuration &lower, const configuration &upper) {
  if (lower.size() != upper.size())
    throw lattice_mismatch("config_leq: configurations of different size");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!leq(lower.value(i), upper.value(i)))
      return false;
  return true;
}

configuration config_join(const configuration &a, const configuration &b) {
  if (a.size() != b.size())
    throw lattice_mismatch("config_join: configurations of different size");
  configuration out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    out = out.with(i, join(a.value(i), b.value(i)));
  return out;
}

std::vector<std::string> render_cli_args(const configuration &config,
                                         const catalog &cat) {
  if (config.size() != cat.size())
    throw render_error("configuration does not match catalog");
  std::vector<std::string> args;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto &spec = cat[i];
    const auto &v = config.value(i);
    if (v.kind() != spec.kind)
      throw render_error("value for '" + spec.name + "' has the wrong kind");
    if (const auto *r = std::get_if<int_render>(&spec.render)) {
      if (v.as_int().is_infinite())
        throw render_error("cannot render infinity for '" + spec.name + "'");
      for (auto tok : split_ws(r->args_template)) {
        replace_all(tok, "{name}", spec.name);
        replace_all(tok, "{value}", std::to_string(v.as_int().value()));
        args.push_back(std::move(tok));
      }
    } else if (const auto *r = std::get_if<bool_render>(&spec.render)) {
      const auto &list = v.as_bool() ? r->when_true : r->when_false;
      args.insert(args.end(), list.begin(), list.end());
    } else {
      const auto &br = std::get<bits_render>(spec.render);
      std::string joined;
      bool first = true;
      for (unsigned b = 0; b < v.as_bits().width(); ++b) {
        if (!v.as_bits().test(b))
          continue;
        if (!first)
          joined += br.separator;
        joined += br.labels[b];
        first = false;
      }
      args.push_back(br.flag);
      args.push_back(std::move(joined));
    }
  }
  return args;
}

std::string serialize_configuration(const configuration &config) {
  std::string out;
  for (std::size_t i = 0; i < config.size(); ++i)
    out += config.name(i) + " = " + to_literal(config.value(i)) + "\n";
  return out;
}

configuration parse_configuration(std::string_view text, const catalog &cat) {
  const auto tree = parse_keytree(text, /*allow_sections=*/false);
  auto values = initial_base_configuration(cat).values();
  std::vector<bool> seen(cat.size(), false);
  for (const auto &e : tree.entries) {
    const auto idx = cat.index_of(e.key);
    if (!idx)
      throw parse_error(e.line, e.key_column, "unknown parameter '" + e.key + "'");
    if (seen[*idx])
      throw parse_error(e.line, e.key_column, "duplicate parameter '" + e.key + "'");
    seen[*idx] = true;
    try {
      auto v = parse_literal(cat[*idx].kind, e.value);
      if (v.is_int() && v.as_int().is_infinite())
        throw parse_error(e.line, e.value_column,
                          "infinity not allowed in concrete configurations");
      values[*idx] = std::move(v);
    } catch (const literal_error &ex) {
      throw parse_error(e.line, e.value_column, ex.what());
    }
  }
  return configuration(cat, std::move(values));
}

} // namespace tuner
