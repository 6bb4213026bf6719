#pragma once

#include <cstdint>

#include "diffreg/core/geometry.hpp"

namespace diffreg {

// Translations uniform in [-1,1] x [-2,2] x [-0.5,0.5] m; rotations uniform
// in [0,2] deg roll, [0,2] deg pitch, [0,15] deg yaw, composed roll first,
// then pitch, then yaw.
RigidTransform generate_synthetic_transform(std::uint64_t seed);

// Independent N(0, sigma^2) on every coordinate.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma,
                              std::uint64_t seed);

// Structured scene inside |x|,|y| <= extent, 0 <= z <= extent: a ground
// plane plus 5-20 surface-sampled boxes and cylinders.
PointCloud generate_scene(std::uint64_t seed, int n_points, double extent);

}  // namespace diffreg
