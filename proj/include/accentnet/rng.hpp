#ifndef ACCENTNET_RNG_HPP
#define ACCENTNET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace accentnet::rng {

// The standard library distributions are implementation-defined; everything
// random in this project goes through these so a seed means the same stream
// on every platform.

inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

inline double gaussian(std::mt19937_64& g) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double u1 = (static_cast<double>(g() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  const double u2 = static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = g();
  } while (draw >= limit);
  return draw % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(g, i)]);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64-style combiner for deriving substream seeds
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace accentnet::rng

#endif
