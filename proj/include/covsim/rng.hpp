#pragma once

#include <cstdint>
#include <random>

namespace covsim {

using RngEngine = std::mt19937_64;

/// splitmix64 step; used to decorrelate user-facing seeds into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic child seed for stream `stream` of a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

inline RngEngine make_rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  return RngEngine(splitmix64(s));
}

}  // namespace covsim
