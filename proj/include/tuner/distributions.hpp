#pragma once

/*
   Composite parameter distributions P = P_base (+) P_delta.

   P_base is a Dirac point in the parameter's lattice; P_delta is a Poisson
   (integers), Bernoulli (booleans) or product-of-Bernoulli (bit vectors)
   variate. A sample is base (+) delta, where (+) is saturating addition,
   logical or, and pointwise or respectively, so every sample dominates the
   base in the lattice order.

   Two refinements act on a distribution after each round of analyses:
   refine_base raises the base using the alarm matrix of completed analyses,
   refine_delta scales exploration by the completion-rate factor eta.
*/

#include "tuner/lattice.hpp"
#include "tuner/random.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tuner {

/// Ceiling for finite integer samples; sampling never produces infinity.
inline constexpr std::uint64_t default_saturation_ceiling = 2147483647ULL;
/// Upper bound on Poisson lambda growth under refine_delta.
inline constexpr double default_lambda_max = 1e5;

struct poisson_delta {
  double lambda = 0.0;
  bool operator==(const poisson_delta &) const = default;
};

struct bernoulli_delta {
  double q = 0.0;
  bool operator==(const bernoulli_delta &) const = default;
};

struct bernoulli_vector_delta {
  std::vector<double> qs;
  bool operator==(const bernoulli_vector_delta &) const = default;
};

class delta_distribution {
public:
  using storage = std::variant<poisson_delta, bernoulli_delta, bernoulli_vector_delta>;

  // Validating constructors: lambda >= 0, every q in [0, 1], non-empty vector.
  delta_distribution(poisson_delta d);
  delta_distribution(bernoulli_delta d);
  delta_distribution(bernoulli_vector_delta d);

  static delta_distribution poisson(double lambda) { return poisson_delta{lambda}; }
  static delta_distribution bernoulli(double q) { return bernoulli_delta{q}; }
  static delta_distribution bernoulli_vector(std::vector<double> qs) {
    return bernoulli_vector_delta{std::move(qs)};
  }

  /// The lattice kind this delta family pairs with.
  lattice_kind kind() const;
  const storage &raw() const { return v_; }

  bool operator==(const delta_distribution &) const = default;

private:
  storage v_;
};

/// "poisson(20)", "bernoulli(0.5)", "bernoulli[0.5,0.5]".
std::string to_text(const delta_distribution &d);
delta_distribution parse_delta(std::string_view text);

class param_distribution {
public:
  /// Throws std::invalid_argument unless base and delta kinds pair up.
  param_distribution(lattice_value base, delta_distribution delta);

  const lattice_value &base() const { return base_; }
  const delta_distribution &delta() const { return delta_; }

  bool operator==(const param_distribution &) const = default;

private:
  lattice_value base_;
  delta_distribution delta_;
};

/// Poisson(lambda) draw, capped at `ceiling`.
std::uint64_t sample_poisson(double lambda, random_stream &rng,
                             std::uint64_t ceiling = default_saturation_ceiling);

lattice_value sample_param(const param_distribution &dist, random_stream &rng,
                           std::uint64_t ceiling = default_saturation_ceiling);

/// Alarm matrix of one round: one row per completed analysis, one column per
/// alarm in the round's universe, plus the parameter values each row used.
struct result_row {
  std::size_t config_index = 0;
  std::vector<bool> produced; ///< produced[j]: row reported alarms[j]
};

struct result_matrix {
  std::vector<std::string> alarms;
  std::vector<result_row> rows;
  /// values_per_param[p][i]: value of parameter p in rows[i]'s configuration.
  std::vector<std::vector<lattice_value>> values_per_param;

  std::size_t m() const { return rows.size(); }
  std::size_t n() const { return alarms.size(); }
};

/// For each alarm column, meets the values of every row that did not report
/// the alarm; each meet that is not top is joined into the running base.
/// The result always dominates current_base.
lattice_value refine_base(const result_matrix &matrix, std::size_t param_index,
                          const lattice_value &current_base);

/// eta = 2 * completed / num_sample + 1 / num_sample.
double scaling_factor(std::size_t completed, std::size_t num_sample);

/// Poisson(l) -> Poisson(min(l * eta, lambda_max)); Bernoulli(q) ->
/// Bernoulli(1 - (1 - q)^eta), pointwise for vectors.
delta_distribution refine_delta(const delta_distribution &delta, double eta,
                                double lambda_max = default_lambda_max);

} // namespace tuner
