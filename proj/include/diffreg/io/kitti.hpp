#pragma once

#include <string>

#include "diffreg/core/geometry.hpp"

namespace diffreg {

// Little-endian float32 records of (x, y, z, intensity). Throws
// MalformedFile when the size is not a multiple of 16, EmptyCloud on empty
// files, IoFailure on filesystem errors.
PointCloud read_kitti_bin(const std::string& path);
void write_kitti_bin(const PointCloud& cloud, const std::string& path);

}  // namespace diffreg
