#pragma once

#include <vector>

#include "diffreg/core/geometry.hpp"

namespace diffreg {

// Three-level coarsening of a cloud: window centers, patch centers, and the
// retained fine points, plus both membership maps. Each point belongs to its
// nearest patch center (if strictly within gamma), each patch to its nearest
// window center.
struct Hierarchy {
  PointCloud window_centers;
  PointCloud patch_centers;
  PointCloud points;

  std::vector<std::vector<int>> patch_members;   // patch -> point indices
  std::vector<std::vector<int>> window_members;  // window -> patch indices
  std::vector<int> patch_of_point;               // point -> patch index
  std::vector<int> window_of_patch;              // patch -> window index
  std::size_t dropped_points = 0;
};

Hierarchy build_hierarchy(const PointCloud& cloud, double voxel_point,
                          double voxel_patch, double voxel_window,
                          double gamma);

}  // namespace diffreg
