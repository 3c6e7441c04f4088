#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace gapflyt {

// Counter-based randomness: every draw is a pure function of its key, so
// per-pixel noise does not depend on iteration order or threading.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value));
}

template <typename... Ts>
constexpr std::uint64_t hash_key(std::uint64_t seed, Ts... values) {
  ((seed = hash_combine(seed, static_cast<std::uint64_t>(values))), ...);
  return seed;
}

/// Uniform in (0, 1), never exactly 0.
inline double to_unit(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

/// Two independent standard normals from one key (Box-Muller).
inline std::pair<double, double> gaussian_pair(std::uint64_t key) {
  const double u1 = to_unit(splitmix64(key));
  const double u2 = to_unit(splitmix64(key ^ 0xD1B54A32D192ED03ULL));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace gapflyt
