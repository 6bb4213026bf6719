#include "diffreg/spatial/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "diffreg/core/errors.hpp"

namespace diffreg {
namespace {

constexpr int kLeafSize = 16;

inline double sq(double v) { return v * v; }

}  // namespace

KdTree::KdTree(const std::vector<Point3>& points) : points_(points) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty())
    root_ = build(0, static_cast<int>(points_.size()), 0);
}

int KdTree::build(int begin, int end, int depth) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.point = begin;
    node.count = end - begin;
    // Stable payload order keeps radius results reproducible.
    std::sort(order_.begin() + begin, order_.begin() + end);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Split the widest axis; falls back to round-robin on degenerate spreads.
  Vec3 lo{std::numeric_limits<double>::max(),
          std::numeric_limits<double>::max(),
          std::numeric_limits<double>::max()};
  Vec3 hi{-lo.x, -lo.y, -lo.z};
  for (int i = begin; i < end; ++i) {
    const Point3& p = points_[order_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  int axis = 0;
  double spread = hi[0] - lo[0];
  for (int a = 1; a < 3; ++a)
    if (hi[a] - lo[a] > spread) {
      spread = hi[a] - lo[a];
      axis = a;
    }
  if (spread <= 0.0) axis = depth % 3;

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa != pb ? pa < pb : a < b;
                   });
  node.axis = axis;
  node.split = points_[order_[mid]][axis];

  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

int KdTree::nearest(const Point3& q) const {
  if (root_ < 0) throw EmptyCloud("KdTree::nearest on empty tree");
  double best_d2 = std::numeric_limits<double>::max();
  int best = -1;

  auto visit = [&](auto&& self, int ni) -> void {
    const Node& node = nodes_[ni];
    if (node.point >= 0) {
      for (int i = node.point; i < node.point + node.count; ++i) {
        const int idx = order_[i];
        const double d2 = (points_[idx] - q).squared_norm();
        if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
          best_d2 = d2;
          best = idx;
        }
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    const int first = delta < 0.0 ? node.left : node.right;
    const int second = delta < 0.0 ? node.right : node.left;
    self(self, first);
    if (sq(delta) <= best_d2) self(self, second);
  };
  visit(visit, root_);
  return best;
}

std::vector<std::pair<double, int>> KdTree::knn(const Point3& q, int k) const {
  std::vector<std::pair<double, int>> result;
  if (root_ < 0 || k <= 0) return result;
  const int want = std::min<int>(k, static_cast<int>(points_.size()));

  // Max-heap on (squared distance, index); the top is the current worst.
  std::priority_queue<std::pair<double, int>> heap;

  auto visit = [&](auto&& self, int ni) -> void {
    const Node& node = nodes_[ni];
    if (node.point >= 0) {
      for (int i = node.point; i < node.point + node.count; ++i) {
        const int idx = order_[i];
        const double d2 = (points_[idx] - q).squared_norm();
        if (static_cast<int>(heap.size()) < want) {
          heap.emplace(d2, idx);
        } else if (std::make_pair(d2, idx) < heap.top()) {
          heap.pop();
          heap.emplace(d2, idx);
        }
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    const int first = delta < 0.0 ? node.left : node.right;
    const int second = delta < 0.0 ? node.right : node.left;
    self(self, first);
    if (static_cast<int>(heap.size()) < want || sq(delta) <= heap.top().first)
      self(self, second);
  };
  visit(visit, root_);

  result.resize(heap.size());
  for (std::size_t i = result.size(); i-- > 0;) {
    result[i] = {std::sqrt(heap.top().first), heap.top().second};
    heap.pop();
  }
  return result;
}

std::vector<int> KdTree::radius(const Point3& q, double r) const {
  std::vector<int> result;
  if (root_ < 0) return result;
  const double r2 = r * r;

  auto visit = [&](auto&& self, int ni) -> void {
    const Node& node = nodes_[ni];
    if (node.point >= 0) {
      for (int i = node.point; i < node.point + node.count; ++i) {
        const int idx = order_[i];
        if ((points_[idx] - q).squared_norm() <= r2) result.push_back(idx);
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    if (delta < 0.0) {
      self(self, node.left);
      if (sq(delta) <= r2) self(self, node.right);
    } else {
      self(self, node.right);
      if (sq(delta) <= r2) self(self, node.left);
    }
  };
  visit(visit, root_);
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace diffreg
