#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "diffreg/core/geometry.hpp"
#include "diffreg/core/matrix.hpp"

namespace diffreg::test {

inline PointCloud random_cloud(std::mt19937_64& rng, std::size_t n,
                               double extent = 10.0) {
  std::uniform_real_distribution<double> uni(-extent, extent);
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    c.points.push_back({uni(rng), uni(rng), uni(rng)});
  return c;
}

inline RigidTransform random_transform(std::mt19937_64& rng,
                                       double max_translation = 5.0) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec3 axis{uni(rng), uni(rng), uni(rng)};
  if (axis.norm() < 1e-6) axis = {1, 0, 0};
  std::uniform_real_distribution<double> angle(0.0, M_PI);
  RigidTransform t;
  t.rotation = rotation_axis_angle(axis, angle(rng));
  t.translation = {uni(rng) * max_translation, uni(rng) * max_translation,
                   uni(rng) * max_translation};
  return t;
}

inline FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t rows,
                                   std::size_t dim, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  FeatureMatrix m(rows, dim);
  for (double& v : m.data) v = gauss(rng);
  return m;
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double transform_rotation_angle_deg(const RigidTransform& a,
                                           const RigidTransform& b) {
  return compute_metrics(a, b).rre_deg;
}

// Entrywise distance to another transform; tight identity checks use this
// instead of the angle (which has an intrinsic fp floor via trig).
inline double transform_entry_distance(const RigidTransform& a,
                                       const RigidTransform& b) {
  double m = 0.0;
  for (int i = 0; i < 9; ++i)
    m = std::max(m, std::abs(a.rotation.m[i] - b.rotation.m[i]));
  m = std::max(m, (a.translation - b.translation).norm());
  return m;
}

}  // namespace diffreg::test
