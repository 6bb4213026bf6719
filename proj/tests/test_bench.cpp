#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Dense>

#include "diffreg/bench/benchmark.hpp"
#include "diffreg/bench/synthetic.hpp"
#include "diffreg/core/errors.hpp"
#include "diffreg/spatial/kdtree.hpp"
#include "test_support.hpp"

using namespace diffreg;

namespace {

// Roll/pitch/yaw back out of the rotation composed as Rz(yaw)Ry(pitch)Rx(roll).
struct Rpy {
  double roll, pitch, yaw;
};

Rpy decompose_rpy(const Mat3& r) {
  Rpy out;
  out.pitch = std::asin(-r(2, 0));
  out.roll = std::atan2(r(2, 1), r(2, 2));
  out.yaw = std::atan2(r(1, 0), r(0, 0));
  return out;
}

// Two-sided Kolmogorov-Smirnov p-value via the asymptotic series.
double ks_uniform_pvalue(std::vector<double> samples, double lo, double hi) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = (samples[i] - lo) / (hi - lo);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

constexpr double kDeg = M_PI / 180.0;

}  // namespace

TEST_CASE("synthetic transforms honor the sampling ranges") {
  double min_tx = 1e9, max_tx = -1e9, min_ty = 1e9, max_ty = -1e9;
  double min_tz = 1e9, max_tz = -1e9;
  std::vector<double> yaws;
  for (int i = 0; i < 10000; ++i) {
    const RigidTransform t =
        generate_synthetic_transform(static_cast<std::uint64_t>(i));
    min_tx = std::min(min_tx, t.translation.x);
    max_tx = std::max(max_tx, t.translation.x);
    min_ty = std::min(min_ty, t.translation.y);
    max_ty = std::max(max_ty, t.translation.y);
    min_tz = std::min(min_tz, t.translation.z);
    max_tz = std::max(max_tz, t.translation.z);

    const Rpy angles = decompose_rpy(t.rotation);
    CHECK(angles.roll >= -1e-12);
    CHECK(angles.roll <= 2.0 * kDeg + 1e-12);
    CHECK(angles.pitch >= -1e-12);
    CHECK(angles.pitch <= 2.0 * kDeg + 1e-12);
    CHECK(angles.yaw >= -1e-12);
    CHECK(angles.yaw <= 15.0 * kDeg + 1e-12);
    yaws.push_back(angles.yaw);
    CHECK(t.is_valid(1e-12));
  }
  CHECK(min_tx >= -1.0);
  CHECK(max_tx <= 1.0);
  CHECK(min_ty >= -2.0);
  CHECK(max_ty <= 2.0);
  CHECK(min_tz >= -0.5);
  CHECK(max_tz <= 0.5);
  // Ranges are actually exercised, not just bounded.
  CHECK(max_tx - min_tx > 1.8);
  CHECK(max_ty - min_ty > 3.6);
  CHECK(max_tz - min_tz > 0.9);

  CHECK(ks_uniform_pvalue(yaws, 0.0, 15.0 * kDeg) > 0.01);
}

TEST_CASE("fixed seed gives identical transforms") {
  const RigidTransform a = generate_synthetic_transform(77);
  const RigidTransform b = generate_synthetic_transform(77);
  CHECK(test::transform_entry_distance(a, b) == 0.0);
}

TEST_CASE("gaussian noise") {
  std::mt19937_64 rng(9);
  const PointCloud cloud = test::random_cloud(rng, 40000, 10.0);

  SUBCASE("sigma zero is the identity") {
    const PointCloud out = add_gaussian_noise(cloud, 0.0, 1);
    CHECK(out.points[17].x == cloud.points[17].x);
  }

  for (double sigma : {0.25, 1.5}) {
    CAPTURE(sigma);
    const PointCloud out = add_gaussian_noise(cloud, sigma, 1);
    double sq_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec3 d = out.points[i] - cloud.points[i];
      sq_sum += d.x * d.x + d.y * d.y + d.z * d.z;
      n += 3;
    }
    const double sample_std = std::sqrt(sq_sum / static_cast<double>(n));
    CHECK(sample_std > 0.95 * sigma);
    CHECK(sample_std < 1.05 * sigma);
  }
}

TEST_CASE("generated scenes are deterministic, bounded, and structured") {
  const PointCloud a = generate_scene(31, 2000, 10.0);
  const PointCloud b = generate_scene(31, 2000, 10.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK((a.points[i] - b.points[i]).norm() == 0.0);

  for (const Point3& p : a.points) {
    CHECK(std::abs(p.x) <= 10.0);
    CHECK(std::abs(p.y) <= 10.0);
    CHECK(p.z >= 0.0);
    CHECK(p.z <= 10.0);
  }

  // Covariance oracle: local plane normals (smallest covariance
  // eigenvector) over sampled neighborhoods must span at least 3 distinct
  // orientations. A denser draw keeps neighborhoods populated.
  const PointCloud dense = generate_scene(31, 8000, 8.0);
  const KdTree tree(dense.points);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> pick(0, dense.size() - 1);
  std::vector<Vec3> normals;
  for (int trial = 0; trial < 600 && normals.size() < 60; ++trial) {
    const Point3& center = dense.points[pick(rng)];
    const std::vector<int> nbrs = tree.radius(center, 0.7);
    if (nbrs.size() < 12) continue;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j : nbrs) {
      const Point3& p = dense.points[static_cast<std::size_t>(j)];
      mean += Eigen::Vector3d(p.x, p.y, p.z);
    }
    mean /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j : nbrs) {
      const Point3& p = dense.points[static_cast<std::size_t>(j)];
      const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(nbrs.size());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    // Keep tight planes only: out-of-plane spread well below in-plane.
    if (eig.eigenvalues()(0) > 1e-4 * eig.eigenvalues()(2)) continue;
    const Eigen::Vector3d n = eig.eigenvectors().col(0);
    normals.push_back({n.x(), n.y(), n.z()});
  }
  REQUIRE(normals.size() >= 10);
  int distinct = 0;
  std::vector<Vec3> reps;
  for (const Vec3& n : normals) {
    bool fresh = true;
    for (const Vec3& r : reps)
      if (std::abs(n.dot(r)) > 0.9) fresh = false;
    if (fresh) {
      reps.push_back(n);
      ++distinct;
    }
  }
  CHECK(distinct >= 3);
}

TEST_CASE("scene requires at least 100 points") {
  CHECK_THROWS_AS(generate_scene(1, 50, 5.0), ConfigError);
}

TEST_CASE("aggregation closed forms") {
  auto outcome = [](double rte, double rre, bool ok) {
    PairOutcome o;
    o.tag = "p";
    o.metrics = {rte, rre};
    o.ok = ok;
    o.runtime_ms = 1.0;
    return o;
  };

  SUBCASE("all perfect means zero error and full recall") {
    std::vector<PairOutcome> v(5, outcome(0.0, 0.0, true));
    const BenchmarkReport r = aggregate_outcomes(v, 60.0, 5.0);
    CHECK(r.rte_mae_cm == 0.0);
    CHECK(r.rte_rmse_cm == 0.0);
    CHECK(r.recall_pct == 100.0);
    CHECK(r.failures == 0);
  }

  SUBCASE("MAE 4 and RMSE sqrt(17) for RTE 3 and 5") {
    const std::vector<PairOutcome> v{outcome(3.0, 0.0, true),
                                     outcome(5.0, 0.0, true)};
    const BenchmarkReport r = aggregate_outcomes(v, 60.0, 5.0);
    CHECK(r.rte_mae_cm == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.rte_rmse_cm == doctest::Approx(std::sqrt(17.0)).epsilon(1e-12));
  }

  SUBCASE("failures stay in the recall denominator") {
    std::vector<PairOutcome> v(9, outcome(1.0, 0.1, true));
    v.push_back(outcome(0.0, 0.0, false));
    const BenchmarkReport r = aggregate_outcomes(v, 60.0, 5.0);
    CHECK(r.failures == 1);
    CHECK(r.recall_pct == doctest::Approx(90.0));
  }

  SUBCASE("RMSE never drops below MAE") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> uni(0.0, 30.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<PairOutcome> v;
      for (int i = 0; i < 12; ++i)
        v.push_back(outcome(uni(rng), uni(rng) / 10.0, true));
      const BenchmarkReport r = aggregate_outcomes(v, 60.0, 5.0);
      CHECK(r.rte_rmse_cm >= r.rte_mae_cm);
      CHECK(r.rre_rmse_deg >= r.rre_mae_deg);
    }
  }
}

TEST_CASE("csv outputs") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "diffreg_bench_test";
  std::filesystem::create_directories(dir);

  std::vector<PairOutcome> v;
  PairOutcome a;
  a.tag = "pair0";
  a.metrics = {3.25, 0.5};
  a.ok = true;
  a.runtime_ms = 12.0;
  v.push_back(a);
  PairOutcome b;
  b.tag = "pair1";
  b.ok = false;
  b.error = "boom";
  v.push_back(b);
  const BenchmarkReport r = aggregate_outcomes(v, 60.0, 5.0);

  const std::string report_path = (dir / "report.csv").string();
  write_report_csv(r, report_path);
  std::ifstream in(report_path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "pair_id,rte_cm,rre_deg,runtime_ms,status");
  std::getline(in, line);
  CHECK(line.find("pair0,3.25,0.5,12,ok") == 0);
  std::getline(in, line);
  CHECK(line.find("failed") != std::string::npos);

  const std::string cdf_path = (dir / "cdf.csv").string();
  write_cdf_csv(r, cdf_path);
  std::ifstream cin(cdf_path);
  std::getline(cin, line);
  CHECK(line == "metric,value,cumulative_probability");
  // CDF is monotone and reaches 1.
  double prev = 0.0, last = 0.0;
  while (std::getline(cin, line)) {
    const auto c2 = line.rfind(',');
    const double p = std::stod(line.substr(c2 + 1));
    if (line.rfind("rte_cm", 0) == 0) {
      CHECK(p >= prev);
      prev = p;
      last = p;
    }
  }
  CHECK(last == doctest::Approx(1.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("synthetic pairs are reproducible and carry their transforms") {
  const auto a = make_synthetic_pairs(3, 11, 0.0, 400, 600, 8.0);
  const auto b = make_synthetic_pairs(3, 11, 0.0, 400, 600, 8.0);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].source.size() == b[i].source.size());
    CHECK(test::transform_entry_distance(a[i].ground_truth,
                                         b[i].ground_truth) == 0.0);
    // target = gt(source)
    const Point3 moved = a[i].ground_truth(a[i].source.points[5]);
    CHECK((moved - a[i].target.points[5]).norm() < 1e-12);
  }
  const auto noisy = make_synthetic_pairs(1, 11, 0.25, 400, 600, 8.0);
  CHECK((noisy[0].source.points[5] - a[0].source.points[5]).norm() > 0.0);
}
