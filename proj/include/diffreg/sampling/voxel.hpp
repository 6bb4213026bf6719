#pragma once

#include "diffreg/core/geometry.hpp"

namespace diffreg {

// One output point per non-empty voxel (the centroid). The grid is anchored
// at the axis-wise minimum of the cloud so the result is
// translation-covariant; output is ordered by integer voxel key.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

// Keeps points that have at least min_neighbors other points within radius;
// input order is preserved.
PointCloud radius_outlier_removal(const PointCloud& cloud, double radius,
                                  int min_neighbors);

}  // namespace diffreg
