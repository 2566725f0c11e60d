#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace matchmix {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream for task `index` under `master_seed`. Streams depend only
// on the pair, so results do not change with the number of workers.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
  std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace matchmix
