#include "diffreg/sampling/hierarchy.hpp"

#include "diffreg/core/errors.hpp"
#include "diffreg/sampling/voxel.hpp"
#include "diffreg/spatial/kdtree.hpp"

namespace diffreg {

Hierarchy build_hierarchy(const PointCloud& cloud, double voxel_point,
                          double voxel_patch, double voxel_window,
                          double gamma) {
  if (!(voxel_point < voxel_patch && voxel_patch < voxel_window))
    throw ConfigError("build_hierarchy: voxel sizes must increase per level");
  if (!(gamma > 0.0)) throw ConfigError("build_hierarchy: gamma must be > 0");

  Hierarchy h;
  const PointCloud fine = voxel_downsample(cloud, voxel_point);
  h.patch_centers = voxel_downsample(fine, voxel_patch);
  h.window_centers = voxel_downsample(h.patch_centers, voxel_window);
  if (fine.empty() || h.patch_centers.empty() || h.window_centers.empty())
    throw EmptyLevel("build_hierarchy: empty level");

  const KdTree patch_tree(h.patch_centers.points);
  h.patch_members.resize(h.patch_centers.size());

  // Exclusive nearest-patch assignment; strictly-farther-than-gamma points
  // are dropped.
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const int nearest = patch_tree.nearest(fine.points[i]);
    const double dist =
        (fine.points[i] - h.patch_centers.points[nearest]).norm();
    if (dist < gamma) {
      const int point_idx = static_cast<int>(h.points.size());
      h.points.points.push_back(fine.points[i]);
      if (fine.has_intensity())
        h.points.intensity.push_back(fine.intensity[i]);
      h.patch_members[nearest].push_back(point_idx);
      h.patch_of_point.push_back(nearest);
    } else {
      ++h.dropped_points;
    }
  }
  if (h.points.empty()) throw EmptyLevel("build_hierarchy: no retained points");

  const KdTree window_tree(h.window_centers.points);
  h.window_members.resize(h.window_centers.size());
  h.window_of_patch.resize(h.patch_centers.size());
  for (std::size_t i = 0; i < h.patch_centers.size(); ++i) {
    const int w = window_tree.nearest(h.patch_centers.points[i]);
    h.window_of_patch[i] = w;
    h.window_members[w].push_back(static_cast<int>(i));
  }
  return h;
}

}  // namespace diffreg
