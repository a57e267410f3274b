#include "tuner/keytree.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tuner {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && is_space(s.back()))
    s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
           c == '.';
  });
}

// Strips a trailing comment outside quotes.
std::string_view strip_comment(std::string_view s) {
  bool in_quotes = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && in_quotes) {
      ++i;
      continue;
    }
    if (s[i] == '"')
      in_quotes = !in_quotes;
    else if (s[i] == '#' && !in_quotes && (i == 0 || is_space(s[i - 1])))
      return s.substr(0, i);
  }
  return s;
}

} // namespace

parse_error::parse_error(std::size_t line, std::size_t column,
                         const std::string &message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      line_(line), column_(column), message_(message) {}

const keytree_entry *keytree::find(std::string_view section,
                                   std::string_view key) const {
  const keytree_entry *found = nullptr;
  for (const auto &e : entries)
    if (e.section == section && e.key == key)
      found = &e;
  return found;
}

std::vector<const keytree_entry *> keytree::in_section(std::string_view section) const {
  std::vector<const keytree_entry *> out;
  for (const auto &e : entries)
    if (e.section == section)
      out.push_back(&e);
  return out;
}

keytree parse_keytree(std::string_view text, bool allow_sections) {
  keytree tree;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const std::string_view body = strip_comment(raw);
    const std::string_view stripped = trim(body);
    if (stripped.empty()) {
      if (text.empty())
        break;
      continue;
    }
    const std::size_t indent = static_cast<std::size_t>(stripped.data() - raw.data());
    if (stripped.front() == '[') {
      if (!allow_sections)
        throw parse_error(line_no, indent + 1, "section headers are not allowed here");
      if (stripped.back() != ']')
        throw parse_error(line_no, indent + 1, "unterminated section header");
      const auto name = trim(stripped.substr(1, stripped.size() - 2));
      if (!valid_key(name))
        throw parse_error(line_no, indent + 2, "invalid section name");
      section = std::string(name);
      if (std::find(tree.sections.begin(), tree.sections.end(), section) ==
          tree.sections.end())
        tree.sections.push_back(section);
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string_view::npos)
      throw parse_error(line_no, indent + 1, "expected 'name = value'");
    const auto key = trim(stripped.substr(0, eq));
    if (!valid_key(key))
      throw parse_error(line_no, indent + 1,
                        key.empty() ? "missing name before '='" : "invalid name '" + std::string(key) + "'");
    std::string_view value_view = trim(stripped.substr(eq + 1));
    const std::size_t value_column =
        value_view.empty() ? indent + eq + 2
                           : static_cast<std::size_t>(value_view.data() - raw.data()) + 1;
    std::string value;
    if (!value_view.empty() && value_view.front() == '"') {
      if (value_view.size() < 2 || value_view.back() != '"')
        throw parse_error(line_no, value_column, "unterminated quoted value");
      for (std::size_t i = 1; i + 1 < value_view.size(); ++i) {
        char c = value_view[i];
        if (c == '\\' && i + 2 < value_view.size())
          c = value_view[++i];
        value.push_back(c);
      }
    } else {
      value = std::string(value_view);
    }
    tree.entries.push_back({section, std::string(key), std::move(value), line_no,
                            static_cast<std::size_t>(key.data() - raw.data()) + 1,
                            value_column});
    if (text.empty())
      break;
  }
  return tree;
}

std::string quote_value(std::string_view value) {
  const bool plain = !value.empty() && trim(value) == value &&
                     value.front() != '"' &&
                     value.find(" #") == std::string_view::npos &&
                     value.find("\t#") == std::string_view::npos &&
                     value.front() != '#';
  if (plain)
    return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\')
      out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace tuner
