#pragma once

#include <cstdint>
#include <random>

namespace sqba {

/// Uniform integer in [0, bound) from a 64-bit engine, identical on every
/// platform (std distributions are implementation-defined).
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = -bound % bound;
  for (;;) {
    const std::uint64_t x = gen();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= limit) return static_cast<std::uint64_t>(m >> 64);
  }
}

/// Uniform double in [0, 1) with 53 bits.
inline double uniform_unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0x9e3779b97f4a7c15ull);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace sqba
