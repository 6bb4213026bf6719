#include "diffreg/bench/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "diffreg/core/errors.hpp"
#include "diffreg/core/rng.hpp"

namespace diffreg {
namespace {

constexpr double kDegree = M_PI / 180.0;

struct Box {
  Vec3 center;
  Vec3 half;  // half extents before yaw
  double yaw;
};

struct Cylinder {
  Vec3 base;
  double radius;
  double height;
};

Point3 sample_box_surface(const Box& b, std::mt19937_64& rng) {
  // Face picked proportional to area.
  const double ax = b.half.y * b.half.z;  // +-x faces
  const double ay = b.half.x * b.half.z;
  const double az = b.half.x * b.half.y;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double pick = uni(rng) * (ax + ay + az);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  Vec3 local;
  if (pick < ax) {
    local = {uni(rng) < 0.5 ? -b.half.x : b.half.x, sym(rng) * b.half.y,
             sym(rng) * b.half.z};
  } else if (pick < ax + ay) {
    local = {sym(rng) * b.half.x, uni(rng) < 0.5 ? -b.half.y : b.half.y,
             sym(rng) * b.half.z};
  } else {
    local = {sym(rng) * b.half.x, sym(rng) * b.half.y,
             uni(rng) < 0.5 ? -b.half.z : b.half.z};
  }
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  return {b.center.x + c * local.x - s * local.y,
          b.center.y + s * local.x + c * local.y, b.center.z + local.z};
}

Point3 sample_cylinder_surface(const Cylinder& cy, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double lateral = 2.0 * M_PI * cy.radius * cy.height;
  const double cap = M_PI * cy.radius * cy.radius;
  const double angle = uni(rng) * 2.0 * M_PI;
  if (uni(rng) * (lateral + cap) < lateral) {
    return {cy.base.x + cy.radius * std::cos(angle),
            cy.base.y + cy.radius * std::sin(angle),
            cy.base.z + uni(rng) * cy.height};
  }
  const double r = cy.radius * std::sqrt(uni(rng));
  return {cy.base.x + r * std::cos(angle), cy.base.y + r * std::sin(angle),
          cy.base.z + cy.height};
}

}  // namespace

RigidTransform generate_synthetic_transform(std::uint64_t seed) {
  std::mt19937_64 rng = named_rng(seed, "synthetic.transform");
  std::uniform_real_distribution<double> tx(-1.0, 1.0);
  std::uniform_real_distribution<double> ty(-2.0, 2.0);
  std::uniform_real_distribution<double> tz(-0.5, 0.5);
  std::uniform_real_distribution<double> small_angle(0.0, 2.0 * kDegree);
  std::uniform_real_distribution<double> yaw_angle(0.0, 15.0 * kDegree);

  RigidTransform t;
  t.translation = {tx(rng), ty(rng), tz(rng)};
  const double roll = small_angle(rng);
  const double pitch = small_angle(rng);
  const double yaw = yaw_angle(rng);
  t.rotation = rotation_rpy(roll, pitch, yaw);
  return t;
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma,
                              std::uint64_t seed) {
  if (sigma < 0.0) throw ConfigError("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return cloud;
  std::mt19937_64 rng = named_rng(seed, "synthetic.noise");
  std::normal_distribution<double> gauss(0.0, sigma);
  PointCloud out = cloud;
  for (Point3& p : out.points) {
    p.x += gauss(rng);
    p.y += gauss(rng);
    p.z += gauss(rng);
  }
  return out;
}

PointCloud generate_scene(std::uint64_t seed, int n_points, double extent) {
  if (n_points < 100)
    throw ConfigError("generate_scene: need at least 100 points");
  if (!(extent > 0.0)) throw ConfigError("generate_scene: extent must be > 0");

  std::mt19937_64 rng = named_rng(seed, "synthetic.scene");
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_real_distribution<double> pos(-0.85 * extent, 0.85 * extent);

  std::uniform_int_distribution<int> primitive_count(5, 20);
  const int n_prims = primitive_count(rng);
  std::vector<Box> boxes;
  std::vector<Cylinder> cylinders;
  for (int i = 0; i < n_prims; ++i) {
    if (uni(rng) < 0.6) {
      Box b;
      b.half = {0.4 + 1.6 * uni(rng), 0.4 + 1.6 * uni(rng),
                0.5 + 1.5 * uni(rng)};
      b.center = {pos(rng), pos(rng), b.half.z};
      b.yaw = uni(rng) * M_PI;
      boxes.push_back(b);
    } else {
      Cylinder c;
      c.radius = 0.3 + 1.0 * uni(rng);
      c.height = 1.0 + 2.5 * uni(rng);
      c.base = {pos(rng), pos(rng), 0.0};
      cylinders.push_back(c);
    }
  }

  const int ground_points = n_points * 2 / 5;
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(n_points));
  std::uniform_real_distribution<double> ground(-extent, extent);
  for (int i = 0; i < ground_points; ++i)
    cloud.points.push_back({ground(rng), ground(rng), 0.0});

  const int structure_points = n_points - ground_points;
  const std::size_t total_prims = boxes.size() + cylinders.size();
  std::uniform_int_distribution<std::size_t> prim_pick(0, total_prims - 1);
  for (int i = 0; i < structure_points; ++i) {
    const std::size_t p = prim_pick(rng);
    Point3 pt = p < boxes.size()
                    ? sample_box_surface(boxes[p], rng)
                    : sample_cylinder_surface(cylinders[p - boxes.size()], rng);
    pt.x = std::clamp(pt.x, -extent, extent);
    pt.y = std::clamp(pt.y, -extent, extent);
    pt.z = std::clamp(pt.z, 0.0, extent);
    cloud.points.push_back(pt);
  }
  return cloud;
}

}  // namespace diffreg
