#pragma once

/*
   Latticed sample spaces for analyzer parameters.

   Three variants are supported:
     - integers with a distinguished infinity (max/min order),
     - booleans (implication order),
     - fixed-width boolean vectors (pointwise implication, i.e. subset order).

   Values are immutable. Binary operations require both operands to be of the
   same variant (and width, for bit vectors); a mismatch is a caller bug and
   raises lattice_mismatch.
*/

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace tuner {

class lattice_mismatch : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed textual lattice literal.
class literal_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class lattice_tag { integer, boolean, bits };

/// Lattice kind of a parameter. Width is meaningful only for bit vectors.
struct lattice_kind {
  lattice_tag tag = lattice_tag::integer;
  unsigned width = 0;

  static lattice_kind integer() { return {lattice_tag::integer, 0}; }
  static lattice_kind boolean() { return {lattice_tag::boolean, 0}; }
  static lattice_kind bits(unsigned width);

  bool operator==(const lattice_kind &) const = default;
  std::string to_string() const;
};

/// Natural number or infinity. Infinity is a separate state, never a sentinel.
class int_val {
public:
  constexpr int_val() = default;
  constexpr explicit int_val(std::uint64_t v) : value_(v) {}
  static constexpr int_val infinity() {
    int_val r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }
  /// Finite value; must not be called on infinity.
  std::uint64_t value() const;

  constexpr bool operator==(const int_val &) const = default;

private:
  std::uint64_t value_ = 0;
  bool infinite_ = false;
};

struct bool_val {
  bool value = false;
  constexpr bool operator==(const bool_val &) const = default;
};

/// Fixed-width bit vector; bit i is the i-th label of the owning parameter.
class bits_val {
public:
  static constexpr unsigned max_width = 64;

  bits_val(unsigned width, std::uint64_t mask);
  static bits_val all(unsigned width);

  unsigned width() const { return width_; }
  std::uint64_t mask() const { return mask_; }
  bool test(unsigned i) const { return (mask_ >> i) & 1u; }
  unsigned popcount() const;

  bool operator==(const bits_val &) const = default;

private:
  std::uint64_t mask_;
  unsigned width_;
};

class lattice_value {
public:
  using storage = std::variant<int_val, bool_val, bits_val>;

  lattice_value(int_val v) : v_(v) {}
  lattice_value(bool_val v) : v_(v) {}
  lattice_value(bits_val v) : v_(v) {}

  static lattice_value integer(std::uint64_t v) { return int_val(v); }
  static lattice_value infinity() { return int_val::infinity(); }
  static lattice_value boolean(bool v) { return bool_val{v}; }
  static lattice_value bits(unsigned width, std::uint64_t mask) {
    return bits_val(width, mask);
  }

  lattice_kind kind() const;

  bool is_int() const { return std::holds_alternative<int_val>(v_); }
  bool is_bool() const { return std::holds_alternative<bool_val>(v_); }
  bool is_bits() const { return std::holds_alternative<bits_val>(v_); }

  const int_val &as_int() const;
  bool as_bool() const;
  const bits_val &as_bits() const;

  const storage &raw() const { return v_; }

  bool operator==(const lattice_value &) const = default;

private:
  storage v_;
};

bool leq(const lattice_value &a, const lattice_value &b);
lattice_value join(const lattice_value &a, const lattice_value &b);
lattice_value meet(const lattice_value &a, const lattice_value &b);
lattice_value top(lattice_kind kind);
lattice_value bottom(lattice_kind kind);

inline bool is_top(const lattice_value &v) { return v == top(v.kind()); }

/// Textual form: decimal or "inf"; "true"/"false"; a '0'/'1' string with the
/// first character for bit 0.
std::string to_literal(const lattice_value &v);
lattice_value parse_literal(lattice_kind kind, std::string_view text);

} // namespace tuner
