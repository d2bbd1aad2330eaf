#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gwh {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Hierarchical substream derivation: the seed for a path such as
// (trial, window, stage) is obtained by folding each component into the
// parent seed. Any node of the tree can be re-created from the master seed
// and its path alone.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(parent);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

// Stage tags used as the last path component of a substream.
namespace stage {
inline constexpr std::uint64_t graph = 1;
inline constexpr std::uint64_t rewire = 2;
inline constexpr std::uint64_t nominal = 3;
inline constexpr std::uint64_t anomaly = 4;
inline constexpr std::uint64_t channel = 5;
inline constexpr std::uint64_t sensor_pick = 6;
inline constexpr std::uint64_t alpha = 7;
}  // namespace stage

}  // namespace gwh
