#include "diffreg/diffusion/params.hpp"

#include <cmath>

#include "diffreg/core/errors.hpp"
#include "diffreg/core/rng.hpp"

namespace diffreg {

DiffusionParams DiffusionParams::seeded(std::size_t feature_dim,
                                        std::uint64_t seed,
                                        const std::string& stream) {
  DiffusionParams p;
  p.seed = seed;
  p.state_dim = 2 * feature_dim;
  const std::size_t s = p.state_dim;
  p.w1 = init_weights(seed, stream + ".w1", 2 * s * s, 2 * s);
  p.b1 = init_weights(seed, stream + ".b1", s, 2 * s);
  p.w2 = init_weights(seed, stream + ".w2", 3 * s * s, 3 * s);
  p.b2 = init_weights(seed, stream + ".b2", s, 3 * s);
  return p;
}

void DiffusionParams::validate() const {
  if (state_dim == 0 || state_dim % 2 != 0)
    throw ConfigError("DiffusionParams: state_dim must be even and > 0");
  if (!(tau > 0.0 && tau <= 1.0))
    throw ConfigError("DiffusionParams: tau must be in (0, 1]");
  if (!(t_final >= 0.0))
    throw ConfigError("DiffusionParams: t_final must be >= 0");
  const std::size_t s = state_dim;
  if (w1.size() != 2 * s * s || b1.size() != s || w2.size() != 3 * s * s ||
      b2.size() != s)
    throw ShapeMismatch("DiffusionParams: weight shapes do not match S");
  for (const auto* block : {&w1, &b1, &w2, &b2})
    for (double v : *block)
      if (!std::isfinite(v))
        throw ConfigError("DiffusionParams: non-finite weight");
}

}  // namespace diffreg
