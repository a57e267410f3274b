#include "tuner/lattice.hpp"

#include <algorithm>
#include <bit>
#include <charconv>

namespace tuner {

namespace {

std::uint64_t width_mask(unsigned width) {
  return width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

[[noreturn]] void mismatch(const lattice_value &a, const lattice_value &b,
                           const char *op) {
  throw lattice_mismatch(std::string(op) + ": operands of kind " +
                         a.kind().to_string() + " and " + b.kind().to_string());
}

void check_same_kind(const lattice_value &a, const lattice_value &b,
                     const char *op) {
  if (a.kind() != b.kind())
    mismatch(a, b, op);
}

} // namespace

lattice_kind lattice_kind::bits(unsigned width) {
  if (width == 0 || width > bits_val::max_width)
    throw std::invalid_argument("bit-vector width must be in [1, 64], got " +
                                std::to_string(width));
  return {lattice_tag::bits, width};
}

std::string lattice_kind::to_string() const {
  switch (tag) {
  case lattice_tag::integer:
    return "int";
  case lattice_tag::boolean:
    return "bool";
  case lattice_tag::bits:
    return "bits(" + std::to_string(width) + ")";
  }
  return "?";
}

std::uint64_t int_val::value() const {
  if (infinite_)
    throw std::logic_error("int_val::value() called on infinity");
  return value_;
}

bits_val::bits_val(unsigned width, std::uint64_t mask)
    : mask_(mask), width_(width) {
  if (width == 0 || width > max_width)
    throw std::invalid_argument("bit-vector width must be in [1, 64], got " +
                                std::to_string(width));
  if ((mask & ~width_mask(width)) != 0)
    throw std::invalid_argument("bit-vector mask exceeds declared width");
}

bits_val bits_val::all(unsigned width) {
  return bits_val(width, width_mask(width));
}

unsigned bits_val::popcount() const {
  return static_cast<unsigned>(std::popcount(mask_));
}

lattice_kind lattice_value::kind() const {
  return std::visit(
      [](const auto &v) -> lattice_kind {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, int_val>)
          return lattice_kind::integer();
        else if constexpr (std::is_same_v<T, bool_val>)
          return lattice_kind::boolean();
        else
          return lattice_kind::bits(v.width());
      },
      v_);
}

const int_val &lattice_value::as_int() const {
  if (auto *p = std::get_if<int_val>(&v_))
    return *p;
  throw lattice_mismatch("expected int value, got " + kind().to_string());
}

bool lattice_value::as_bool() const {
  if (auto *p = std::get_if<bool_val>(&v_))
    return p->value;
  throw lattice_mismatch("expected bool value, got " + kind().to_string());
}

const bits_val &lattice_value::as_bits() const {
  if (auto *p = std::get_if<bits_val>(&v_))
    return *p;
  throw lattice_mismatch("expected bits value, got " + kind().to_string());
}

bool leq(const lattice_value &a, const lattice_value &b) {
  check_same_kind(a, b, "leq");
  switch (a.kind().tag) {
  case lattice_tag::integer: {
    const auto &x = a.as_int(), &y = b.as_int();
    if (y.is_infinite())
      return true;
    if (x.is_infinite())
      return false;
    return x.value() <= y.value();
  }
  case lattice_tag::boolean:
    return !a.as_bool() || b.as_bool();
  case lattice_tag::bits:
    return (a.as_bits().mask() & ~b.as_bits().mask()) == 0;
  }
  return false;
}

lattice_value join(const lattice_value &a, const lattice_value &b) {
  check_same_kind(a, b, "join");
  switch (a.kind().tag) {
  case lattice_tag::integer: {
    const auto &x = a.as_int(), &y = b.as_int();
    if (x.is_infinite() || y.is_infinite())
      return int_val::infinity();
    return int_val(std::max(x.value(), y.value()));
  }
  case lattice_tag::boolean:
    return bool_val{a.as_bool() || b.as_bool()};
  case lattice_tag::bits:
    return bits_val(a.as_bits().width(), a.as_bits().mask() | b.as_bits().mask());
  }
  return a;
}

lattice_value meet(const lattice_value &a, const lattice_value &b) {
  check_same_kind(a, b, "meet");
  switch (a.kind().tag) {
  case lattice_tag::integer: {
    const auto &x = a.as_int(), &y = b.as_int();
    if (x.is_infinite())
      return y;
    if (y.is_infinite())
      return x;
    return int_val(std::min(x.value(), y.value()));
  }
  case lattice_tag::boolean:
    return bool_val{a.as_bool() && b.as_bool()};
  case lattice_tag::bits:
    return bits_val(a.as_bits().width(), a.as_bits().mask() & b.as_bits().mask());
  }
  return a;
}

lattice_value top(lattice_kind kind) {
  switch (kind.tag) {
  case lattice_tag::integer:
    return int_val::infinity();
  case lattice_tag::boolean:
    return bool_val{true};
  case lattice_tag::bits:
    return bits_val::all(kind.width);
  }
  throw std::invalid_argument("unknown lattice kind");
}

lattice_value bottom(lattice_kind kind) {
  switch (kind.tag) {
  case lattice_tag::integer:
    return int_val(0);
  case lattice_tag::boolean:
    return bool_val{false};
  case lattice_tag::bits:
    return bits_val(kind.width, 0);
  }
  throw std::invalid_argument("unknown lattice kind");
}

std::string to_literal(const lattice_value &v) {
  switch (v.kind().tag) {
  case lattice_tag::integer: {
    const auto &i = v.as_int();
    return i.is_infinite() ? "inf" : std::to_string(i.value());
  }
  case lattice_tag::boolean:
    return v.as_bool() ? "true" : "false";
  case lattice_tag::bits: {
    const auto &b = v.as_bits();
    std::string s(b.width(), '0');
    for (unsigned i = 0; i < b.width(); ++i)
      if (b.test(i))
        s[i] = '1';
    return s;
  }
  }
  return {};
}

lattice_value parse_literal(lattice_kind kind, std::string_view text) {
  auto quoted = [&] { return "'" + std::string(text) + "'"; };
  switch (kind.tag) {
  case lattice_tag::integer: {
    if (text == "inf")
      return int_val::infinity();
    std::uint64_t v = 0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
      throw literal_error("expected a natural number or 'inf', got " + quoted());
    return int_val(v);
  }
  case lattice_tag::boolean:
    if (text == "true")
      return bool_val{true};
    if (text == "false")
      return bool_val{false};
    throw literal_error("expected 'true' or 'false', got " + quoted());
  case lattice_tag::bits: {
    if (text.size() != kind.width)
      throw literal_error("expected a bit string of length " +
                          std::to_string(kind.width) + ", got " + quoted());
    std::uint64_t mask = 0;
    for (unsigned i = 0; i < kind.width; ++i) {
      if (text[i] == '1')
        mask |= std::uint64_t{1} << i;
      else if (text[i] != '0')
        throw literal_error("bit strings contain only '0' and '1', got " +
                            quoted());
    }
    return bits_val(kind.width, mask);
  }
  }
  throw literal_error("unknown lattice kind");
}

} // namespace tuner
