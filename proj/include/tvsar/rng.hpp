#pragma once

#include <cstdint>
#include <random>

namespace tvsar {

/// Deterministic per-stream seeding: replicate j always sees the same draws
/// no matter how many workers run or in what order streams are consumed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(mix_seed(seed, stream));
}

}  // namespace tvsar
