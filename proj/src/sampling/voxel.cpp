#include "diffreg/sampling/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>

#include "diffreg/core/errors.hpp"
#include "diffreg/spatial/kdtree.hpp"

namespace diffreg {
namespace {

using VoxelKey = std::tuple<std::int64_t, std::int64_t, std::int64_t>;

struct Accum {
  Vec3 sum{};
  double intensity = 0.0;
  std::size_t count = 0;
};

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  if (cloud.empty()) throw EmptyCloud("voxel_downsample: empty input");
  if (!(voxel_size > 0.0))
    throw ConfigError("voxel_downsample: voxel_size must be > 0");

  Vec3 origin{std::numeric_limits<double>::max(),
              std::numeric_limits<double>::max(),
              std::numeric_limits<double>::max()};
  for (const Point3& p : cloud.points)
    for (int a = 0; a < 3; ++a) origin[a] = std::min(origin[a], p[a]);

  const double inv = 1.0 / voxel_size;
  std::map<VoxelKey, Accum> grid;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    const VoxelKey key{
        static_cast<std::int64_t>(std::floor((p.x - origin.x) * inv)),
        static_cast<std::int64_t>(std::floor((p.y - origin.y) * inv)),
        static_cast<std::int64_t>(std::floor((p.z - origin.z) * inv))};
    Accum& a = grid[key];
    a.sum += p;
    if (cloud.has_intensity()) a.intensity += cloud.intensity[i];
    ++a.count;
  }

  PointCloud out;
  out.points.reserve(grid.size());
  if (cloud.has_intensity()) out.intensity.reserve(grid.size());
  for (const auto& [key, a] : grid) {
    const double n = static_cast<double>(a.count);
    out.points.push_back(a.sum * (1.0 / n));
    if (cloud.has_intensity())
      out.intensity.push_back(static_cast<float>(a.intensity / n));
  }
  return out;
}

PointCloud radius_outlier_removal(const PointCloud& cloud, double radius,
                                  int min_neighbors) {
  if (cloud.empty()) throw EmptyCloud("radius_outlier_removal: empty input");
  if (!(radius > 0.0) || min_neighbors < 1)
    throw ConfigError("radius_outlier_removal: invalid parameters");

  const KdTree tree(cloud.points);
  PointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::vector<int> within = tree.radius(cloud.points[i], radius);
    // The query point itself is always in the result.
    if (static_cast<int>(within.size()) - 1 >= min_neighbors) {
      out.points.push_back(cloud.points[i]);
      if (cloud.has_intensity()) out.intensity.push_back(cloud.intensity[i]);
    }
  }
  if (out.empty())
    throw EmptyCloud("radius_outlier_removal: all points removed");
  return out;
}

}  // namespace diffreg
