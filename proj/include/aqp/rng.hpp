#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aqp {

// All randomness in the library flows through mt19937_64 plus the draw
// helpers below. Standard-library distributions are implementation-defined,
// so seeded runs would not reproduce across toolchains; these helpers keep
// every byte of output a pure function of the seed.
using Rng = std::mt19937_64;

// Derives an independent stream for (seed, stream_id), e.g. one per event.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  Rng rng(0);
  rng.seed(seq);
  return rng;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Modulo bias is below 2^-32 for the sizes used here.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return rng() % n;
}

// Standard normal via Box-Muller (cosine branch only).
inline double gaussian(Rng& rng) {
  double u1 = uniform_double(rng);
  while (u1 <= 0.0) {
    u1 = uniform_double(rng);
  }
  const double u2 = uniform_double(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace aqp
