#include "tuner/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tuner {

namespace {

void check_probability(double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("Bernoulli probability must lie in [0, 1]");
}

std::string format_real(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_real(std::string_view s) {
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ')
    s.remove_suffix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw literal_error("expected a real number, got '" + std::string(s) + "'");
  return v;
}

// Sequential-search inversion; exact for small lambda.
std::uint64_t poisson_inversion(double lambda, random_stream &rng) {
  const double u = rng.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  const auto guard = static_cast<std::uint64_t>(20.0 * lambda + 200.0);
  while (u >= cdf && k < guard) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

constexpr double inversion_limit = 30.0;

} // namespace

delta_distribution::delta_distribution(poisson_delta d) : v_(d) {
  if (!(d.lambda >= 0.0) || !std::isfinite(d.lambda))
    throw std::invalid_argument("Poisson lambda must be finite and non-negative");
}

delta_distribution::delta_distribution(bernoulli_delta d) : v_(d) {
  check_probability(d.q);
}

delta_distribution::delta_distribution(bernoulli_vector_delta d) {
  if (d.qs.empty() || d.qs.size() > bits_val::max_width)
    throw std::invalid_argument("Bernoulli vector width must be in [1, 64]");
  for (double q : d.qs)
    check_probability(q);
  v_ = std::move(d);
}

lattice_kind delta_distribution::kind() const {
  if (std::holds_alternative<poisson_delta>(v_))
    return lattice_kind::integer();
  if (std::holds_alternative<bernoulli_delta>(v_))
    return lattice_kind::boolean();
  return lattice_kind::bits(
      static_cast<unsigned>(std::get<bernoulli_vector_delta>(v_).qs.size()));
}

std::string to_text(const delta_distribution &d) {
  if (auto *p = std::get_if<poisson_delta>(&d.raw()))
    return "poisson(" + format_real(p->lambda) + ")";
  if (auto *b = std::get_if<bernoulli_delta>(&d.raw()))
    return "bernoulli(" + format_real(b->q) + ")";
  const auto &v = std::get<bernoulli_vector_delta>(d.raw());
  std::string s = "bernoulli[";
  for (std::size_t i = 0; i < v.qs.size(); ++i) {
    if (i)
      s += ',';
    s += format_real(v.qs[i]);
  }
  return s + "]";
}

delta_distribution parse_delta(std::string_view text) {
  auto fail = [&]() -> delta_distribution {
    throw literal_error("expected 'poisson(l)', 'bernoulli(q)' or "
                        "'bernoulli[q1,...,qc]', got '" + std::string(text) + "'");
  };
  const auto open = text.find_first_of("([");
  if (open == std::string_view::npos || text.size() < open + 2)
    return fail();
  const char close = text[open] == '(' ? ')' : ']';
  if (text.back() != close)
    return fail();
  const auto family = text.substr(0, open);
  auto args = text.substr(open + 1, text.size() - open - 2);
  std::vector<double> values;
  while (true) {
    const auto comma = args.find(',');
    values.push_back(parse_real(args.substr(0, comma)));
    if (comma == std::string_view::npos)
      break;
    args.remove_prefix(comma + 1);
  }
  if (family == "poisson" && close == ')' && values.size() == 1)
    return poisson_delta{values[0]};
  if (family == "bernoulli" && close == ')' && values.size() == 1)
    return bernoulli_delta{values[0]};
  if (family == "bernoulli" && close == ']')
    return bernoulli_vector_delta{std::move(values)};
  return fail();
}

param_distribution::param_distribution(lattice_value base, delta_distribution delta)
    : base_(std::move(base)), delta_(std::move(delta)) {
  if (base_.kind() != delta_.kind())
    throw std::invalid_argument("base of kind " + base_.kind().to_string() +
                                " cannot pair with a delta for " +
                                delta_.kind().to_string());
}

std::uint64_t sample_poisson(double lambda, random_stream &rng,
                             std::uint64_t ceiling) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("Poisson lambda must be non-negative");
  if (lambda == 0.0)
    return 0;
  if (lambda < inversion_limit)
    return std::min(poisson_inversion(lambda, rng), ceiling);

  // Sum of independent Poisson(lambda / chunks) draws, each below the limit.
  const auto chunks = static_cast<std::uint64_t>(lambda / 25.0) + 1;
  const double piece = lambda / static_cast<double>(chunks);
  std::uint64_t total = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    total += poisson_inversion(piece, rng);
    if (total >= ceiling)
      return ceiling;
  }
  return total;
}

lattice_value sample_param(const param_distribution &dist, random_stream &rng,
                           std::uint64_t ceiling) {
  const auto &base = dist.base();
  const auto &delta = dist.delta().raw();
  switch (base.kind().tag) {
  case lattice_tag::integer: {
    const auto k = sample_poisson(std::get<poisson_delta>(delta).lambda, rng, ceiling);
    const auto &b = base.as_int();
    if (b.is_infinite())
      return b;
    if (b.value() >= ceiling)
      return b;
    return int_val(b.value() + std::min(k, ceiling - b.value()));
  }
  case lattice_tag::boolean: {
    const bool d = rng.bernoulli(std::get<bernoulli_delta>(delta).q);
    return bool_val{base.as_bool() || d};
  }
  case lattice_tag::bits: {
    const auto &qs = std::get<bernoulli_vector_delta>(delta).qs;
    std::uint64_t mask = base.as_bits().mask();
    for (std::size_t i = 0; i < qs.size(); ++i)
      if (rng.bernoulli(qs[i]))
        mask |= std::uint64_t{1} << i;
    return bits_val(base.as_bits().width(), mask);
  }
  }
  return base;
}

lattice_value refine_base(const result_matrix &matrix, std::size_t param_index,
                          const lattice_value &current_base) {
  if (matrix.m() == 0)
    return current_base;
  if (param_index >= matrix.values_per_param.size())
    throw std::out_of_range("refine_base: parameter index out of range");
  const auto &values = matrix.values_per_param[param_index];
  if (values.size() != matrix.m())
    throw std::invalid_argument("refine_base: value vector length differs from row count");

  const auto kind = current_base.kind();
  const auto top_value = top(kind);
  lattice_value refined = current_base;
  for (std::size_t j = 0; j < matrix.n(); ++j) {
    lattice_value tmp = top_value;
    for (std::size_t i = 0; i < matrix.m(); ++i)
      if (!matrix.rows[i].produced.at(j))
        tmp = meet(tmp, values[i]);
    if (tmp != top_value)
      refined = join(refined, tmp);
  }
  return refined;
}

double scaling_factor(std::size_t completed, std::size_t num_sample) {
  if (num_sample == 0)
    throw std::invalid_argument("scaling_factor: num_sample must be positive");
  if (completed > num_sample)
    throw std::invalid_argument("scaling_factor: completed exceeds num_sample");
  const double n = static_cast<double>(num_sample);
  return 2.0 * (static_cast<double>(completed) / n) + 1.0 / n;
}

delta_distribution refine_delta(const delta_distribution &delta, double eta,
                                double lambda_max) {
  if (!(eta > 0.0))
    throw std::invalid_argument("refine_delta: eta must be positive");
  auto scale_q = [eta](double q) {
    return std::clamp(1.0 - std::pow(1.0 - q, eta), 0.0, 1.0);
  };
  if (auto *p = std::get_if<poisson_delta>(&delta.raw()))
    return poisson_delta{std::min(p->lambda * eta, lambda_max)};
  if (auto *b = std::get_if<bernoulli_delta>(&delta.raw()))
    return bernoulli_delta{scale_q(b->q)};
  auto qs = std::get<bernoulli_vector_delta>(delta.raw()).qs;
  for (double &q : qs)
    q = scale_q(q);
  return bernoulli_vector_delta{std::move(qs)};
}

} // namespace tuner
