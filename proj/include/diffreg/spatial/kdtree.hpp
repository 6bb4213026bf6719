#pragma once

#include <utility>
#include <vector>

#include "diffreg/core/geometry.hpp"

namespace diffreg {

// Static 3D k-d tree over a point set. Queries are exact; equal distances
// resolve to the lower point index so results are deterministic.
class KdTree {
 public:
  explicit KdTree(const std::vector<Point3>& points);

  std::size_t size() const { return points_.size(); }

  // Index of the nearest point (tree must be non-empty).
  int nearest(const Point3& q) const;
  // k nearest as (distance, index), ascending by (distance, index).
  std::vector<std::pair<double, int>> knn(const Point3& q, int k) const;
  // Indices with |p - q| <= radius, ascending by index.
  std::vector<int> radius(const Point3& q, double r) const;

 private:
  struct Node {
    int axis = 0;
    double split = 0.0;
    int point = -1;       // leaf payload start in order_
    int count = 0;        // leaf payload size
    int left = -1, right = -1;
  };

  int build(int begin, int end, int depth);

  std::vector<Point3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace diffreg
