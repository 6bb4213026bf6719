#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace diffreg {

// Derives an independent 64-bit stream from (seed, name) so every tensor /
// module draws from its own reproducible sequence.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view name);
std::mt19937_64 named_rng(std::uint64_t seed, std::string_view name);

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], drawn as f32 so weights
// round-trip bit-exactly through the f32 model file.
std::vector<double> init_weights(std::uint64_t seed, std::string_view name,
                                 std::size_t count, std::size_t fan_in);

}  // namespace diffreg
