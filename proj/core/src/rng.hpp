#pragma once

// Deterministic random helpers shared by split/train/synthgen. All draws are
// built from raw mt19937_64 output with explicit arithmetic so results are
// identical across standard-library implementations.

#include <cstdint>
#include <random>
#include <vector>

namespace overlapcheck::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, stream) pair.
inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

inline std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates.
template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(next_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace overlapcheck::detail
