#include "tuner/random.hpp"

namespace tuner {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

random_stream::random_stream(std::uint64_t seed)
    : seed_(seed), engine_(mix64(seed)) {}

random_stream random_stream::split(std::uint64_t key) const {
  return random_stream(mix64(seed_ ^ mix64(key + 0x632be59bd9b4e019ULL)));
}

double random_stream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

} // namespace tuner
