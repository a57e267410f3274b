#pragma once

// Shared test helpers: readable printers, fixture paths, temp directories and
// reference implementations written directly on integers and masks.

#include "tuner/distributions.hpp"
#include "tuner/paramspace.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace tuner {

inline void PrintTo(const lattice_value &v, std::ostream *os) { *os << to_literal(v); }
inline void PrintTo(const configuration &c, std::ostream *os) {
  *os << "{";
  for (std::size_t i = 0; i < c.size(); ++i)
    *os << (i ? ", " : "") << c.name(i) << "=" << to_literal(c.value(i));
  *os << "}";
}

} // namespace tuner

namespace testing_support {

inline std::string fixture(const std::string &name) {
  return std::string(TUNER_FIXTURE_DIR) + "/" + name;
}

inline std::string config_dir() { return TUNER_CONFIG_DIR; }

/// Fresh, empty directory removed on destruction.
class temp_dir {
public:
  explicit temp_dir(const std::string &tag) {
    static std::mt19937_64 gen(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("strategy-tuner-" + tag + "-" + std::to_string(gen() % 1000000000));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~temp_dir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  temp_dir(const temp_dir &) = delete;
  temp_dir &operator=(const temp_dir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::string str(const std::string &child = "") const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

private:
  std::filesystem::path path_;
};

/*
   Reference for base refinement, by exhaustive search over a finite carrier.

   Elements are plain integers: naturals 0..limit for the integer lattice,
   0/1 for booleans, masks 0..2^w-1 for bit vectors. `below(x, y)` is the
   order. The greatest lower bound of a set is found as the element that is
   below every member and above every other such element; the result is the
   least x above the current base and above every lower bound that is not top.
*/
struct finite_lattice {
  std::vector<std::uint64_t> carrier;
  std::uint64_t top;
  bool (*below)(std::uint64_t, std::uint64_t);
};

inline finite_lattice int_carrier(std::uint64_t limit) {
  finite_lattice l;
  for (std::uint64_t x = 0; x <= limit; ++x)
    l.carrier.push_back(x);
  // Values in tests stay below `limit`, which then stands in for infinity.
  l.top = limit;
  l.below = [](std::uint64_t a, std::uint64_t b) { return a <= b; };
  return l;
}

inline finite_lattice bool_carrier() {
  return {{0, 1}, 1, [](std::uint64_t a, std::uint64_t b) { return a == 0 || b == 1; }};
}

inline finite_lattice mask_carrier(unsigned width) {
  finite_lattice l;
  for (std::uint64_t x = 0; x < (1ULL << width); ++x)
    l.carrier.push_back(x);
  l.top = (1ULL << width) - 1;
  l.below = [](std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; };
  return l;
}

inline std::uint64_t brute_glb(const finite_lattice &l, const std::vector<std::uint64_t> &xs) {
  std::optional<std::uint64_t> best;
  for (auto c : l.carrier) {
    bool lower = true;
    for (auto x : xs)
      lower = lower && l.below(c, x);
    if (lower && (!best || l.below(*best, c)))
      best = c;
  }
  return *best;
}

/// produced[i][j]: row i reported alarm j. values[i]: row i's parameter value.
inline std::uint64_t brute_refine(const finite_lattice &l,
                                  const std::vector<std::vector<bool>> &produced,
                                  const std::vector<std::uint64_t> &values,
                                  std::uint64_t base) {
  std::vector<std::uint64_t> bounds{base};
  const std::size_t n = produced.empty() ? 0 : produced.front().size();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::uint64_t> eliminating;
    for (std::size_t i = 0; i < produced.size(); ++i)
      if (!produced[i][j])
        eliminating.push_back(values[i]);
    // glb of the empty set is top, which never contributes.
    const auto g = eliminating.empty() ? l.top : brute_glb(l, eliminating);
    if (g != l.top)
      bounds.push_back(g);
  }
  std::optional<std::uint64_t> least;
  for (auto c : l.carrier) {
    bool upper = true;
    for (auto b : bounds)
      upper = upper && l.below(b, c);
    if (upper && (!least || l.below(c, *least)))
      least = c;
  }
  return *least;
}

} // namespace testing_support
