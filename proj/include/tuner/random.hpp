#pragma once

#include <cstdint>
#include <random>

namespace tuner {

/// Seedable, splittable pseudo-random stream.
///
/// split(key) derives an independent child stream whose state depends only on
/// the parent's seed and the key, never on how many values the parent has
/// already drawn. The tuner maps (iteration, sample, parameter) to a child via
/// three successive splits, so a run is reproducible from one seed.
class random_stream {
public:
  explicit random_stream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  random_stream split(std::uint64_t key) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform();
  bool bernoulli(double q) { return uniform() < q; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

} // namespace tuner
