#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "diffreg/bench/synthetic.hpp"
#include "diffreg/core/errors.hpp"
#include "diffreg/estimation/estimators.hpp"
#include "diffreg/sampling/hierarchy.hpp"
#include "test_support.hpp"

using namespace diffreg;
using test::random_cloud;
using test::random_transform;

namespace {

struct Scenario {
  Hierarchy hier_u, hier_v;
  CorrespondenceSet points, patches;
  RigidTransform truth;
};

// Correspondences from a real hierarchy pair: ground-truth pairs by index
// with a chosen fraction replaced by uniform outliers.
Scenario make_scenario(std::uint64_t seed, double outlier_fraction,
                       int n_points = 1200) {
  Scenario s;
  const PointCloud scene = generate_scene(seed, n_points, 8.0);
  s.truth = generate_synthetic_transform(seed);
  s.hier_u = build_hierarchy(scene, 0.3, 2.4, 9.6, 2.0);
  // The target side gets the transformed retained points so ground-truth
  // index pairs are exact.
  s.hier_v = s.hier_u;
  s.hier_v.points = apply_transform(s.hier_u.points, s.truth);
  s.hier_v.patch_centers = apply_transform(s.hier_u.patch_centers, s.truth);
  s.hier_v.window_centers = apply_transform(s.hier_u.window_centers, s.truth);

  std::mt19937_64 rng(seed ^ 0xabcdef);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> pick(
      0, static_cast<int>(s.hier_u.points.size()) - 1);

  s.points.level = MatchLevel::kPoint;
  for (int i = 0; i < static_cast<int>(s.hier_u.points.size()); ++i) {
    Correspondence c{i, i, 1.0};
    if (uni(rng) < outlier_fraction) {
      c.j = pick(rng);  // uniform wrong partner
      if (c.j == i) c.j = (c.j + 1) % static_cast<int>(s.hier_u.points.size());
    }
    s.points.pairs.push_back(c);
  }

  s.patches.level = MatchLevel::kPatch;
  for (int p = 0; p < static_cast<int>(s.hier_u.patch_centers.size()); ++p)
    s.patches.pairs.push_back({p, p, 1.0});
  return s;
}

}  // namespace

TEST_CASE("lgr recovers exact correspondences") {
  const Scenario s = make_scenario(3, 0.0);
  EstimatorConfig cfg;
  const RigidTransform t =
      estimate_lgr(s.points, s.patches, s.hier_u, s.hier_v, cfg);
  const ErrorMetrics m = compute_metrics(t, s.truth);
  CHECK(m.rre_deg < 1e-5);
  CHECK(m.rte_cm < 1e-6 * 100.0);
  CHECK(t.is_valid(1e-9));
}

TEST_CASE("lgr stays accurate with 30 percent outliers") {
  int good = 0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    const Scenario s = make_scenario(100 + trial, 0.3);
    EstimatorConfig cfg;
    const RigidTransform t =
        estimate_lgr(s.points, s.patches, s.hier_u, s.hier_v, cfg);
    const ErrorMetrics m = compute_metrics(t, s.truth);
    if (m.rre_deg <= 0.2 && m.rte_cm <= 5.0) ++good;
  }
  CHECK(good == trials);
}

TEST_CASE("lgr with a single patch pair reduces to weighted SVD") {
  Scenario s = make_scenario(5, 0.0, 600);
  // Shrink everything onto one patch pair.
  CorrespondenceSet one;
  one.level = MatchLevel::kPatch;
  one.pairs = {{0, 0, 1.0}};
  CorrespondenceSet pts;
  pts.level = MatchLevel::kPoint;
  std::vector<Point3> src, dst;
  std::vector<double> w;
  for (int idx : s.hier_u.patch_members[0]) {
    pts.pairs.push_back({idx, idx, 1.0});
    src.push_back(s.hier_u.points.points[static_cast<std::size_t>(idx)]);
    dst.push_back(s.hier_v.points.points[static_cast<std::size_t>(idx)]);
    w.push_back(1.0);
  }
  REQUIRE(pts.pairs.size() >= 3);
  EstimatorConfig cfg;
  const RigidTransform got =
      estimate_lgr(pts, one, s.hier_u, s.hier_v, cfg);
  const RigidTransform want = weighted_svd_fit(src, dst, w);
  CHECK(test::transform_entry_distance(got, want) < 1e-9);
}

TEST_CASE("lgr refinement with huge radius equals global weighted SVD") {
  const Scenario s = make_scenario(7, 0.0, 800);
  EstimatorConfig cfg;
  cfg.inlier_radius = 1e9;
  const RigidTransform got =
      estimate_lgr(s.points, s.patches, s.hier_u, s.hier_v, cfg);

  std::vector<Point3> src, dst;
  std::vector<double> w;
  for (const Correspondence& c : s.points.pairs) {
    src.push_back(s.hier_u.points.points[static_cast<std::size_t>(c.i)]);
    dst.push_back(s.hier_v.points.points[static_cast<std::size_t>(c.j)]);
    w.push_back(c.score);
  }
  const RigidTransform want = weighted_svd_fit(src, dst, w);
  CHECK(test::transform_entry_distance(got, want) < 1e-9);
}

TEST_CASE("lgr requires at least three point pairs") {
  const Scenario s = make_scenario(9, 0.0, 600);
  CorrespondenceSet two;
  two.level = MatchLevel::kPoint;
  two.pairs = {{0, 0, 1.0}, {1, 1, 1.0}};
  EstimatorConfig cfg;
  CHECK_THROWS_AS(estimate_lgr(two, s.patches, s.hier_u, s.hier_v, cfg),
                  InsufficientPairs);
}

TEST_CASE("ransac") {
  SUBCASE("all-inlier input recovers exactly") {
    const Scenario s = make_scenario(11, 0.0, 800);
    EstimatorConfig cfg;
    cfg.ransac_iters = 200;
    const RigidTransform t = estimate_ransac(s.points, s.hier_u.points,
                                             s.hier_v.points, cfg);
    const ErrorMetrics m = compute_metrics(t, s.truth);
    CHECK(m.rre_deg < 1e-5);
    CHECK(m.rte_cm < 1e-4);
  }
  SUBCASE("50 percent outliers succeed over seeded trials") {
    int good = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
      const Scenario s = make_scenario(200 + trial, 0.5, 800);
      EstimatorConfig cfg;
      cfg.ransac_iters = 5000;
      cfg.seed = 77 + static_cast<std::uint64_t>(trial);
      const RigidTransform t = estimate_ransac(s.points, s.hier_u.points,
                                               s.hier_v.points, cfg);
      const ErrorMetrics m = compute_metrics(t, s.truth);
      if (m.rre_deg <= 0.5 && m.rte_cm <= 5.0) ++good;
    }
    CHECK(good >= 19);  // >= 0.95 success probability
  }
  SUBCASE("fixed seed gives identical output") {
    const Scenario s = make_scenario(13, 0.4, 800);
    EstimatorConfig cfg;
    cfg.seed = 5;
    const RigidTransform a = estimate_ransac(s.points, s.hier_u.points,
                                             s.hier_v.points, cfg);
    const RigidTransform b = estimate_ransac(s.points, s.hier_u.points,
                                             s.hier_v.points, cfg);
    CHECK(test::transform_entry_distance(a, b) == 0.0);
  }
  SUBCASE("fewer pairs than the sample size throws") {
    const Scenario s = make_scenario(15, 0.0, 600);
    CorrespondenceSet two;
    two.level = MatchLevel::kPoint;
    two.pairs = {{0, 0, 1.0}, {1, 1, 1.0}};
    EstimatorConfig cfg;
    CHECK_THROWS_AS(
        estimate_ransac(two, s.hier_u.points, s.hier_v.points, cfg),
        InsufficientPairs);
  }
}

TEST_CASE("icp") {
  std::mt19937_64 rng(31);

  SUBCASE("identical clouds converge immediately") {
    const PointCloud cloud = random_cloud(rng, 200, 5.0);
    EstimatorConfig cfg;
    const RigidTransform t =
        estimate_icp(cloud, cloud, RigidTransform::identity(), cfg);
    CHECK(test::transform_entry_distance(t, RigidTransform::identity()) <
          1e-9);
  }

  SUBCASE("small transforms are recovered from identity") {
    int good = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const PointCloud cloud =
          generate_scene(400 + static_cast<std::uint64_t>(trial), 1000, 8.0);
      RigidTransform small;
      small.rotation = rotation_rpy(0.005, -0.004, 0.02);
      small.translation = {0.05, -0.08, 0.02};
      const PointCloud moved = apply_transform(cloud, small);
      EstimatorConfig cfg;
      const RigidTransform t =
          estimate_icp(cloud, moved, RigidTransform::identity(), cfg);
      const ErrorMetrics m = compute_metrics(t, small);
      if (m.rre_deg <= 0.1 && m.rte_cm <= 1.0) ++good;
    }
    CHECK(good == 10);
  }

  SUBCASE("a 180-degree rotation lands in a wrong local optimum") {
    const PointCloud cloud = generate_scene(500, 1000, 8.0);
    RigidTransform flip;
    flip.rotation = rotation_rpy(0.0, 0.0, M_PI);
    const PointCloud moved = apply_transform(cloud, flip);
    EstimatorConfig cfg;
    ErrorMetrics m;
    bool diverged = false;
    try {
      const RigidTransform t =
          estimate_icp(cloud, moved, RigidTransform::identity(), cfg);
      m = compute_metrics(t, flip);
    } catch (const Divergence&) {
      diverged = true;
    }
    // Non-recovery documented: either diverges or stays far from truth.
    CHECK((diverged || m.rre_deg > 10.0));
  }

  SUBCASE("clouds below three points throw") {
    PointCloud tiny;
    tiny.points = {{0, 0, 0}, {1, 0, 0}};
    EstimatorConfig cfg;
    CHECK_THROWS_AS(
        estimate_icp(tiny, tiny, RigidTransform::identity(), cfg),
        InsufficientPairs);
  }
}

TEST_CASE("all estimators return orthonormal rotations") {
  const Scenario s = make_scenario(17, 0.3, 800);
  EstimatorConfig cfg;
  const RigidTransform a =
      estimate_lgr(s.points, s.patches, s.hier_u, s.hier_v, cfg);
  const RigidTransform b =
      estimate_ransac(s.points, s.hier_u.points, s.hier_v.points, cfg);
  const RigidTransform c =
      estimate_svd(s.points, s.hier_u.points, s.hier_v.points);
  CHECK(a.is_valid(1e-9));
  CHECK(b.is_valid(1e-9));
  CHECK(c.is_valid(1e-9));
}
