#pragma once

// Line-oriented "name = value" files with optional [section.sub] headers and
// '#' comments. Shared by configuration, catalog, profile and run files.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tuner {

/// Diagnostic carrying a 1-based source position.
class parse_error : public std::runtime_error {
public:
  parse_error(std::size_t line, std::size_t column, const std::string &message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string &message() const { return message_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

struct keytree_entry {
  std::string section; ///< "" for top level
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t key_column = 0;
  std::size_t value_column = 0;
};

struct keytree {
  std::vector<keytree_entry> entries;

  /// Section names in order of first appearance (including empty sections).
  std::vector<std::string> sections;

  const keytree_entry *find(std::string_view section, std::string_view key) const;
  std::vector<const keytree_entry *> in_section(std::string_view section) const;
};

/// Values may be double-quoted to keep surrounding spaces or a '#'.
/// A '#' begins a comment at line start or after whitespace.
keytree parse_keytree(std::string_view text, bool allow_sections = true);

/// Quotes a value when parse_keytree would otherwise not reproduce it.
std::string quote_value(std::string_view value);

std::string read_text_file(const std::string &path);

} // namespace tuner
