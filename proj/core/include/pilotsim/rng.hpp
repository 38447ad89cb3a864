#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pilotsim {

// Engine used for every random draw in the simulator. Distributions come from
// Boost.Random so that draws are identical across standard libraries.
using Rng = std::mt19937_64;

// Independent random streams inside one drop. Each stage of the pipeline owns
// its stream, so changing one stage (e.g. the allocation scheme) never shifts
// the draws of another (e.g. the channel realizations).
enum class Stream : std::uint64_t {
  kPlacement = 1,
  kLargeScale = 2,
  kSchedule = 3,
  kAllocation = 4,
  kSmallScale = 5,
  kNoise = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: the seed of a substream is a pure function of
// the master seed and the path of counters leading to it.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = splitmix64(master);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

}  // namespace pilotsim
