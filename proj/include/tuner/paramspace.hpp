#pragma once

#include "tuner/distributions.hpp"
#include "tuner/keytree.hpp"
#include "tuner/lattice.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tuner {

/// Integer flag template; whitespace separates arguments, {name} and {value}
/// are substituted.
struct int_render {
  std::string args_template = "-eva-{name} {value}";
  bool operator==(const int_render &) const = default;
};

/// Argument lists emitted for false and true; an empty list omits the flag.
struct bool_render {
  std::vector<std::string> when_false;
  std::vector<std::string> when_true;
  bool operator==(const bool_render &) const = default;
};

/// Enabled labels joined by `separator` as the value of `flag`.
struct bits_render {
  std::string flag;
  std::vector<std::string> labels;
  std::string separator = ",";
  bool operator==(const bits_render &) const = default;
};

using render_rule = std::variant<int_render, bool_render, bits_render>;

struct param_spec {
  std::string name;
  lattice_kind kind;
  param_distribution initial;
  render_rule render;
};

class render_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Inverse of lattice_kind::to_string.
lattice_kind parse_kind(std::string_view text);

class catalog {
public:
  catalog() = default;
  /// Validates unique names and kind agreement of distributions and rules.
  explicit catalog(std::vector<param_spec> specs);

  std::size_t size() const { return specs_.size(); }
  const param_spec &operator[](std::size_t i) const { return specs_.at(i); }
  const std::vector<param_spec> &specs() const { return specs_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  auto begin() const { return specs_.begin(); }
  auto end() const { return specs_.end(); }

private:
  std::vector<param_spec> specs_;
};

/// Frama-C/Eva parameters with their initial distributions.
catalog default_catalog();

/// Applies a catalog override file on top of `base`. Each [name] section edits
/// an existing parameter or declares a new one (which then needs `kind`).
/// Keys: kind, base, delta, args, when_false, when_true, flag, labels.
catalog load_catalog_override(std::string_view text, const catalog &base);

/// One table row per parameter: "name | kind | base | delta".
std::string format_catalog_table(const catalog &cat);

/// A concrete value for every catalog parameter, in catalog order.
class configuration {
public:
  configuration() = default;
  /// Throws std::invalid_argument if sizes or kinds disagree with the catalog.
  configuration(const catalog &cat, std::vector<lattice_value> values);

  std::size_t size() const { return values_.size(); }
  const std::string &name(std::size_t i) const { return names_.at(i); }
  const lattice_value &value(std::size_t i) const { return values_.at(i); }
  const std::vector<lattice_value> &values() const { return values_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  configuration with(std::size_t i, lattice_value v) const;

  bool operator==(const configuration &) const = default;

private:
  std::vector<std::string> names_;
  std::vector<lattice_value> values_;
};

configuration initial_base_configuration(const catalog &cat);
configuration bottom_configuration(const catalog &cat);

/// Pointwise order: lower.value(i) below upper.value(i) for every i.
bool config_leq(const configuration &lower, const configuration &upper);
configuration config_join(const configuration &a, const configuration &b);

std::vector<std::string> render_cli_args(const configuration &config,
                                         const catalog &cat);

/// "name = value" lines in catalog order.
std::string serialize_configuration(const configuration &config);

/// Parses "name = value" lines. Parameters not mentioned keep the catalog's
/// initial base value; duplicates, unknown names, malformed literals and
/// infinity are diagnosed with line and column.
configuration parse_configuration(std::string_view text, const catalog &cat);

} // namespace tuner
