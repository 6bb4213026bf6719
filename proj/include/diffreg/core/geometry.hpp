#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace diffreg {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double squared_norm() const { return dot(*this); }
  double norm() const;
};

using Point3 = Vec3;

// Row-major 3x3 matrix; just the operations the transforms need.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double& operator()(int r, int c) { return m[r * 3 + c]; }
  double operator()(int r, int c) const { return m[r * 3 + c]; }

  static Mat3 identity() { return Mat3{}; }
  Mat3 transpose() const;
  Mat3 operator*(const Mat3& o) const;
  Vec3 operator*(const Vec3& v) const;
  double det() const;
  double trace() const { return m[0] + m[4] + m[8]; }
};

struct PointCloud {
  std::vector<Point3> points;
  std::vector<float> intensity;  // empty when absent

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_intensity() const { return !intensity.empty(); }
};

struct RigidTransform {
  Mat3 rotation;
  Vec3 translation;

  static RigidTransform identity() { return {}; }
  Point3 operator()(const Point3& p) const {
    return rotation * p + translation;
  }
  // Orthonormality and det(R)=+1 within tol.
  bool is_valid(double tol = 1e-9) const;
};

struct ErrorMetrics {
  double rte_cm = 0.0;
  double rre_deg = 0.0;
};

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);
// compose(T1, T2) applies T2 first, then T1.
RigidTransform compose(const RigidTransform& t1, const RigidTransform& t2);
RigidTransform inverse(const RigidTransform& t);
ErrorMetrics compute_metrics(const RigidTransform& estimate,
                             const RigidTransform& truth);

// Weighted least-squares rigid fit (Kabsch). Throws DegenerateConfiguration
// when the weighted cross-covariance has rank < 2.
RigidTransform weighted_svd_fit(const std::vector<Point3>& src,
                                const std::vector<Point3>& dst,
                                const std::vector<double>& weights);

// Rotation about x (roll), then y (pitch), then z (yaw); angles in radians.
Mat3 rotation_rpy(double roll, double pitch, double yaw);
Mat3 rotation_axis_angle(const Vec3& axis, double angle);

// 12-number row-major text line: 9 rotation entries then the translation.
std::string to_line(const RigidTransform& t);
RigidTransform transform_from_line(const std::string& line);

}  // namespace diffreg
