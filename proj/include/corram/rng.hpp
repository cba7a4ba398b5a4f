#pragma once

#include <cstdint>

namespace corram {

// Counter-based random stream: value i of stream `seed` is a pure function of
// (seed, i), so traces are reproducible no matter how work is chunked across
// threads.  Mixing is the splitmix64 finalizer applied twice.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ (counter * 0xd6e8feb86659fd93ULL));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(at(seed, counter) >> 11) * 0x1.0p-53;
}

// Derived stream id for sub-experiments (per-trial seeds and the like).
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  return at(seed ^ 0xa02bdbf7bb3c0a7ULL, index);
}

}  // namespace rng
}  // namespace corram
