#include "diffreg/descriptor/geometric.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "diffreg/core/errors.hpp"
#include "diffreg/core/rng.hpp"
#include "diffreg/spatial/kdtree.hpp"

namespace diffreg {
namespace {

constexpr int kHistogramBins = 8;

// Seeded d x 13 matrix with orthonormal columns; distances in raw descriptor
// space are preserved by the projection.
Eigen::MatrixXd projection_map(std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng = named_rng(seed, "descriptor.projection");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, kRawDescriptorDim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < kRawDescriptorDim; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(dim, kRawDescriptorDim);
  // Fix column signs so the map is a deterministic function of the seed
  // rather than of QR internals.
  for (int j = 0; j < q.cols(); ++j)
    if (q(0, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace

FeatureMatrix descriptor_projection(std::uint64_t seed, std::size_t dim) {
  const Eigen::MatrixXd q = projection_map(seed, dim);
  FeatureMatrix out(dim, kRawDescriptorDim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < kRawDescriptorDim; ++j)
      out.at(i, j) = q(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j));
  return out;
}

GeometricEncoding encode_geometric(const PointCloud& queries,
                                   const PointCloud& support,
                                   double neighborhood_radius,
                                   std::size_t dim, std::uint64_t seed) {
  if (queries.size() < 1 || support.size() < 10)
    throw EmptyCloud("encode_geometric: need at least 10 support points");
  if (dim < 16) throw ConfigError("encode_geometric: dim must be >= 16");
  if (!(neighborhood_radius > 0.0))
    throw ConfigError("encode_geometric: radius must be > 0");

  const Eigen::MatrixXd proj = projection_map(seed, dim);
  const KdTree tree(support.points);
  const bool self_support = &queries == &support;

  GeometricEncoding out;
  out.features = FeatureMatrix(queries.size(), dim);

  std::vector<double> raw(kRawDescriptorDim);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Point3& center = queries.points[i];
    std::vector<int> nbrs = tree.radius(center, neighborhood_radius);
    if (self_support)
      nbrs.erase(std::remove(nbrs.begin(), nbrs.end(), static_cast<int>(i)),
                 nbrs.end());
    if (nbrs.size() < 4) {
      out.sparse_points.push_back(static_cast<int>(i));
      continue;  // row stays zero
    }

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j : nbrs)
      mean += Eigen::Vector3d(support.points[static_cast<std::size_t>(j)].x,
                              support.points[static_cast<std::size_t>(j)].y,
                              support.points[static_cast<std::size_t>(j)].z);
    mean /= static_cast<double>(nbrs.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    std::array<double, kHistogramBins> hist{};
    for (int j : nbrs) {
      const Point3& pt = support.points[static_cast<std::size_t>(j)];
      const Eigen::Vector3d p(pt.x, pt.y, pt.z);
      const Eigen::Vector3d d = p - mean;
      cov += d * d.transpose();
      const double dist = (pt - center).norm();
      int bin = static_cast<int>(dist / neighborhood_radius * kHistogramBins);
      bin = std::clamp(bin, 0, kHistogramBins - 1);
      hist[static_cast<std::size_t>(bin)] += 1.0;
    }
    cov /= static_cast<double>(nbrs.size());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    // Ascending from Eigen; we want l1 >= l2 >= l3.
    const double l1 = std::max(eig.eigenvalues()(2), 0.0);
    const double l2 = std::max(eig.eigenvalues()(1), 0.0);
    const double l3 = std::max(eig.eigenvalues()(0), 0.0);
    const double l1_safe = l1 > 0.0 ? l1 : 1.0;
    const double lsum = l1 + l2 + l3;

    raw[0] = (l1 - l2) / l1_safe;                    // linearity
    raw[1] = (l2 - l3) / l1_safe;                    // planarity
    raw[2] = l3 / l1_safe;                           // sphericity
    raw[3] = lsum > 0.0 ? l3 / lsum : 0.0;           // curvature proxy
    raw[4] = std::log1p(static_cast<double>(nbrs.size())) / 4.0;  // density
    for (int b = 0; b < kHistogramBins; ++b)
      raw[5 + static_cast<std::size_t>(b)] =
          hist[static_cast<std::size_t>(b)] /
          static_cast<double>(nbrs.size());

    double* row = out.features.row(i);
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < kRawDescriptorDim; ++c)
        acc += proj(static_cast<Eigen::Index>(r),
                    static_cast<Eigen::Index>(c)) *
               raw[c];
      row[r] = acc;
    }
  }
  return out;
}

GeometricEncoding encode_geometric(const PointCloud& cloud,
                                   double neighborhood_radius,
                                   std::size_t dim, std::uint64_t seed) {
  if (cloud.size() < 10)
    throw EmptyCloud("encode_geometric: need at least 10 points");
  return encode_geometric(cloud, cloud, neighborhood_radius, dim, seed);
}

}  // namespace diffreg
