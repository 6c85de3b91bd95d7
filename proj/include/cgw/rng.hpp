#pragma once

#include <cstdint>
#include <random>

namespace cgw {

using Rng = std::mt19937_64;

// Independent stream for replica `index` of a run seeded with `seed`. The
// mapping is fixed, so results do not depend on how replicas are scheduled.
Rng make_stream(std::uint64_t seed, std::uint64_t index);

// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform on {0, ..., n-1}; n must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

}  // namespace cgw
