#pragma once

#include <cstdint>
#include <vector>

#include "diffreg/core/geometry.hpp"
#include "diffreg/core/matrix.hpp"

namespace diffreg {

struct GeometricEncoding {
  FeatureMatrix features;
  // Points with fewer than 4 neighbors in radius; their rows are zero.
  std::vector<int> sparse_points;
};

// Per-point rotation-invariant descriptor: covariance eigenvalue shape ratios
// (linearity, planarity, sphericity), curvature proxy, local density, and an
// 8-bin neighbor-distance histogram, projected to `dim` by a seeded random
// orthonormal map.
GeometricEncoding encode_geometric(const PointCloud& cloud,
                                   double neighborhood_radius,
                                   std::size_t dim, std::uint64_t seed);

// Same descriptor evaluated at `queries` with neighborhoods drawn from
// `support` (coarse levels use the dense point level as support).
GeometricEncoding encode_geometric(const PointCloud& queries,
                                   const PointCloud& support,
                                   double neighborhood_radius,
                                   std::size_t dim, std::uint64_t seed);

// Raw descriptor width before projection.
inline constexpr std::size_t kRawDescriptorDim = 13;

// The seeded (dim x 13) orthonormal-column projection encode_geometric
// applies to raw descriptors; transposing it recovers the raw components.
FeatureMatrix descriptor_projection(std::uint64_t seed, std::size_t dim);

}  // namespace diffreg
