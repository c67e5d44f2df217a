#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace yf {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent child seed for a (base, indices...) path, e.g. set m, run r.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(base);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

using Rng = std::mt19937_64;

// Uniform on (0, 1], independent of the standard library's distributions.
inline double uniform_open_closed(Rng& rng) {
  return 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace yf
