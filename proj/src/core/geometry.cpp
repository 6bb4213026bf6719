#include "diffreg/core/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "diffreg/core/errors.hpp"

namespace diffreg {

double Vec3::norm() const { return std::sqrt(squared_norm()); }

Mat3 Mat3::transpose() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

Vec3 Mat3::operator*(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

double Mat3::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

bool RigidTransform::is_valid(double tol) const {
  const Mat3 rtr = rotation.transpose() * rotation;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(rtr(i, j) - expect) > tol) return false;
    }
  return std::abs(rotation.det() - 1.0) <= tol;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point3& p : cloud.points) out.points.push_back(t(p));
  out.intensity = cloud.intensity;
  return out;
}

RigidTransform compose(const RigidTransform& t1, const RigidTransform& t2) {
  RigidTransform r;
  r.rotation = t1.rotation * t2.rotation;
  r.translation = t1.rotation * t2.translation + t1.translation;
  return r;
}

RigidTransform inverse(const RigidTransform& t) {
  RigidTransform r;
  r.rotation = t.rotation.transpose();
  r.translation = (r.rotation * t.translation) * -1.0;
  return r;
}

ErrorMetrics compute_metrics(const RigidTransform& estimate,
                             const RigidTransform& truth) {
  ErrorMetrics m;
  m.rte_cm = 100.0 * (estimate.translation - truth.translation).norm();
  const Mat3 rel = estimate.rotation.transpose() * truth.rotation;
  // arccos(clamp((trace-1)/2)) evaluated in atan2 form: the skew part gives
  // |sin| exactly, so tiny angles are not lost to the acos cliff.
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double sx = rel(2, 1) - rel(1, 2);
  const double sy = rel(0, 2) - rel(2, 0);
  const double sz = rel(1, 0) - rel(0, 1);
  const double s = 0.5 * std::sqrt(sx * sx + sy * sy + sz * sz);
  m.rre_deg = std::atan2(s, c) * 180.0 / M_PI;
  return m;
}

RigidTransform weighted_svd_fit(const std::vector<Point3>& src,
                                const std::vector<Point3>& dst,
                                const std::vector<double>& weights) {
  if (src.size() != dst.size() || src.size() != weights.size())
    throw ShapeMismatch("weighted_svd_fit: list lengths differ");
  if (src.size() < 3)
    throw InsufficientPairs("weighted_svd_fit: need at least 3 pairs");

  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0)
      throw DegenerateConfiguration("weighted_svd_fit: negative weight");
    wsum += w;
  }
  if (wsum <= 0.0)
    throw DegenerateConfiguration("weighted_svd_fit: zero weight sum");

  Eigen::Vector3d cs = Eigen::Vector3d::Zero();
  Eigen::Vector3d cd = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double w = weights[i];
    cs += w * Eigen::Vector3d(src[i].x, src[i].y, src[i].z);
    cd += w * Eigen::Vector3d(dst[i].x, dst[i].y, dst[i].z);
  }
  cs /= wsum;
  cd /= wsum;

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d a(src[i].x - cs.x(), src[i].y - cs.y(),
                            src[i].z - cs.z());
    const Eigen::Vector3d b(dst[i].x - cd.x(), dst[i].y - cd.y(),
                            dst[i].z - cd.z());
    h += weights[i] * a * b.transpose();
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= sv(0) * 1e-12)
    throw DegenerateConfiguration(
        "weighted_svd_fit: cross-covariance rank < 2");

  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  // Reflection fix: flip the smallest singular direction.
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix3d rot = v * d * u.transpose();
  const Eigen::Vector3d t = cd - rot * cs;

  RigidTransform out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.rotation(i, j) = rot(i, j);
  out.translation = {t.x(), t.y(), t.z()};
  return out;
}

Mat3 rotation_rpy(double roll, double pitch, double yaw) {
  const Mat3 rx = rotation_axis_angle({1, 0, 0}, roll);
  const Mat3 ry = rotation_axis_angle({0, 1, 0}, pitch);
  const Mat3 rz = rotation_axis_angle({0, 0, 1}, yaw);
  return rz * ry * rx;
}

Mat3 rotation_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  const Vec3 a = {axis.x / n, axis.y / n, axis.z / n};
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  Mat3 r;
  r(0, 0) = t * a.x * a.x + c;
  r(0, 1) = t * a.x * a.y - s * a.z;
  r(0, 2) = t * a.x * a.z + s * a.y;
  r(1, 0) = t * a.x * a.y + s * a.z;
  r(1, 1) = t * a.y * a.y + c;
  r(1, 2) = t * a.y * a.z - s * a.x;
  r(2, 0) = t * a.x * a.z - s * a.y;
  r(2, 1) = t * a.y * a.z + s * a.x;
  r(2, 2) = t * a.z * a.z + c;
  return r;
}

std::string to_line(const RigidTransform& t) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < 9; ++i) {
    if (i) os << ' ';
    os << t.rotation.m[i];
  }
  os << ' ' << t.translation.x << ' ' << t.translation.y << ' '
     << t.translation.z;
  return os.str();
}

RigidTransform transform_from_line(const std::string& line) {
  std::istringstream is(line);
  RigidTransform t;
  for (int i = 0; i < 9; ++i)
    if (!(is >> t.rotation.m[i]))
      throw MalformedFile("transform line: expected 12 numbers");
  if (!(is >> t.translation.x >> t.translation.y >> t.translation.z))
    throw MalformedFile("transform line: expected 12 numbers");
  return t;
}

}  // namespace diffreg
