#pragma once

#include <cstdint>
#include <random>

namespace expertgame {

using Stream = std::mt19937_64;

/// Independent generator for item `index` of a run seeded with `seed`.
/// The result depends only on (seed, index), so work can be split across
/// threads without changing any draw.
inline Stream make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
  return Stream(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Stream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace expertgame
