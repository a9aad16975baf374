#pragma once

#include <cstdint>
#include <random>

namespace mdix::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based stream splitting: the derived seed is a pure function of
/// (master, stream, index), so parallel and serial schedules draw the same
/// numbers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream,
                                   std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(master, stream, index));
}

// Stream tags for the simulation harness.
inline constexpr std::uint64_t kStreamReplication = 0x7265706C69636174ULL;
inline constexpr std::uint64_t kStreamTruth = 0x74727574682D3030ULL;

}  // namespace mdix::rng
