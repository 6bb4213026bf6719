#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace diffreg {

// Weights and solver settings for one Beltrami diffusion module. The rhs is
// two EdgeConv layers over the joint state z = [H | I] of width S = 2d:
//   layer 1: per edge Linear([z_i, z_j - z_i]): 2S -> S, max-aggregated
//   tanh
//   layer 2: per edge Linear([u_i, u_j - u_i, z_i]): 3S -> S, max-aggregated
// At d = 256 this reproduces the 1024/512 and 1536/512 layer shapes.
struct DiffusionParams {
  int k = 15;
  double t_final = 1.0;
  double rtol = 0.01;
  double atol = 0.01;
  double tau = 1.0;  // explicit-scheme step
  std::uint64_t seed = 0;

  std::size_t state_dim = 0;          // S = 2 * feature dim
  std::vector<double> w1, b1;         // (2S x S) row-major in-major, S
  std::vector<double> w2, b2;         // (3S x S), S

  static DiffusionParams seeded(std::size_t feature_dim, std::uint64_t seed,
                                const std::string& stream);
  // Throws ShapeMismatch / ConfigError on inconsistent sizes.
  void validate() const;
};

}  // namespace diffreg
