#pragma once

#include <cstdint>
#include <random>

namespace gqte {

using RngEngine = std::mt19937_64;

// SplitMix64 finalizer. Used to derive decorrelated substream seeds so that
// replicate r of a study or chain block b of a run gets its own stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline RngEngine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return RngEngine(mix_seed(seed, stream));
}

// Uniform draw strictly inside (0,1); redraws the (measure-zero) endpoints so
// downstream inverse-cdf transforms stay finite.
inline double runif01(RngEngine& eng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v = u(eng);
  while (v <= 0.0 || v >= 1.0) v = u(eng);
  return v;
}

}  // namespace gqte
