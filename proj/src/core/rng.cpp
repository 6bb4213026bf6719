#include "diffreg/core/rng.hpp"

#include <cmath>

namespace diffreg {
namespace {

// FNV-1a, then splitmix64 finalization to spread low-entropy names.
std::uint64_t mix(std::uint64_t h) {
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return mix(h ^ mix(seed));
}

std::mt19937_64 named_rng(std::uint64_t seed, std::string_view name) {
  return std::mt19937_64(stream_seed(seed, name));
}

std::vector<double> init_weights(std::uint64_t seed, std::string_view name,
                                 std::size_t count, std::size_t fan_in) {
  std::mt19937_64 rng = named_rng(seed, name);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> w(count);
  for (double& v : w) v = static_cast<double>(static_cast<float>(dist(rng)));
  return w;
}

}  // namespace diffreg
