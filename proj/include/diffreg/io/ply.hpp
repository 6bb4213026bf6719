#pragma once

#include <string>

#include "diffreg/core/geometry.hpp"

namespace diffreg {

// ASCII PLY with xyz vertices, for inspection in external viewers.
void write_ply(const PointCloud& cloud, const std::string& path);

}  // namespace diffreg
