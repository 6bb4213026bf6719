#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "diffreg/bench/synthetic.hpp"
#include "diffreg/core/errors.hpp"
#include "diffreg/pipeline/pipeline.hpp"
#include "diffreg/sampling/hierarchy.hpp"
#include "diffreg/sampling/voxel.hpp"
#include "test_support.hpp"

using namespace diffreg;
using test::random_matrix;

namespace {

PipelineConfig fast_config() {
  PipelineConfig cfg;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("self-registration is near identity") {
  const PointCloud scene = generate_scene(21, 2000, 8.0);
  const PipelineConfig cfg = fast_config();
  const ModelParams params = seeded_model(cfg.model_dims(), cfg.seed);
  const RegistrationResult r = register_pair(scene, scene, cfg, params);
  const ErrorMetrics m =
      compute_metrics(r.transform, RigidTransform::identity());
  CHECK(m.rre_deg < 0.05);
  CHECK(m.rte_cm < 1.0);
}

TEST_CASE("synthetic transform recovery within acceptance thresholds") {
  const PointCloud scene = generate_scene(22, 2500, 10.0);
  const RigidTransform truth = generate_synthetic_transform(22);
  const PointCloud moved = apply_transform(scene, truth);
  const PipelineConfig cfg = fast_config();
  const ModelParams params = seeded_model(cfg.model_dims(), cfg.seed);
  const RegistrationResult r = register_pair(scene, moved, cfg, params);
  const ErrorMetrics m = compute_metrics(r.transform, truth);
  CHECK(m.rre_deg <= 0.5);
  CHECK(m.rte_cm <= 5.0);
}

TEST_CASE("registration is bit-deterministic") {
  const PointCloud scene = generate_scene(23, 1500, 8.0);
  const RigidTransform truth = generate_synthetic_transform(23);
  const PointCloud moved = apply_transform(scene, truth);
  const PipelineConfig cfg = fast_config();
  const ModelParams params = seeded_model(cfg.model_dims(), cfg.seed);

  const RegistrationResult a = register_pair(scene, moved, cfg, params);
  const RegistrationResult b = register_pair(scene, moved, cfg, params);
  CHECK(a.transform.rotation.m == b.transform.rotation.m);
  CHECK(a.transform.translation.x == b.transform.translation.x);
  CHECK(a.transform.translation.y == b.transform.translation.y);
  CHECK(a.transform.translation.z == b.transform.translation.z);
  REQUIRE(a.point_correspondences.pairs.size() ==
          b.point_correspondences.pairs.size());
  for (std::size_t i = 0; i < a.point_correspondences.pairs.size(); ++i) {
    CHECK(a.point_correspondences.pairs[i].i ==
          b.point_correspondences.pairs[i].i);
    CHECK(a.point_correspondences.pairs[i].j ==
          b.point_correspondences.pairs[i].j);
    CHECK(a.point_correspondences.pairs[i].score ==
          b.point_correspondences.pairs[i].score);
  }
}

TEST_CASE("stage containment: points within patches within windows") {
  const PointCloud scene = generate_scene(24, 2000, 8.0);
  const RigidTransform truth = generate_synthetic_transform(24);
  const PointCloud moved = apply_transform(scene, truth);
  const PipelineConfig cfg = fast_config();
  const ModelParams params = seeded_model(cfg.model_dims(), cfg.seed);
  const RegistrationResult r = register_pair(scene, moved, cfg, params);

  // Rebuild hierarchies the same deterministic way to check containment.
  const PointCloud src =
      radius_outlier_removal(scene, cfg.ror_radius, cfg.ror_min_neighbors);
  const PointCloud dst =
      radius_outlier_removal(moved, cfg.ror_radius, cfg.ror_min_neighbors);
  const Hierarchy hu = build_hierarchy(src, cfg.voxel_point, cfg.voxel_patch,
                                       cfg.voxel_window, cfg.gamma);
  const Hierarchy hv = build_hierarchy(dst, cfg.voxel_point, cfg.voxel_patch,
                                       cfg.voxel_window, cfg.gamma);

  std::set<std::pair<int, int>> patch_pairs, window_pairs;
  for (const auto& p : r.patch_correspondences.pairs)
    patch_pairs.emplace(p.i, p.j);
  for (const auto& w : r.window_correspondences.pairs)
    window_pairs.emplace(w.i, w.j);

  for (const auto& p : r.point_correspondences.pairs) {
    const int pu = hu.patch_of_point[static_cast<std::size_t>(p.i)];
    const int pv = hv.patch_of_point[static_cast<std::size_t>(p.j)];
    CHECK(patch_pairs.count({pu, pv}) == 1);
  }
  for (const auto& pp : r.patch_correspondences.pairs) {
    const int wu = hu.window_of_patch[static_cast<std::size_t>(pp.i)];
    const int wv = hv.window_of_patch[static_cast<std::size_t>(pp.j)];
    CHECK(window_pairs.count({wu, wv}) == 1);
  }
}

TEST_CASE("all four ablation variants complete the same scene") {
  const PointCloud scene = generate_scene(25, 1500, 8.0);
  const RigidTransform truth = generate_synthetic_transform(25);
  const PointCloud moved = apply_transform(scene, truth);

  for (int variant = 0; variant < 4; ++variant) {
    CAPTURE(variant);
    PipelineConfig cfg = fast_config();
    if (variant == 1) cfg.use_window_stage = false;
    if (variant == 2) cfg.use_beltrami = false;
    if (variant == 3) cfg.use_ode_transformer = false;
    const ModelParams params = seeded_model(cfg.model_dims(), cfg.seed);
    const RegistrationResult r = register_pair(scene, moved, cfg, params);
    CHECK(r.transform.is_valid(1e-9));
    CHECK(!r.point_correspondences.pairs.empty());
  }
}

TEST_CASE("window pooling") {
  std::mt19937_64 rng(61);

  SUBCASE("single window pools the max over its patches") {
    Hierarchy h;
    h.window_centers.points = {Point3{0, 0, 0}};
    h.patch_centers.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    h.window_members = {{0, 1, 2}};
    h.window_of_patch = {0, 0, 0};
    const FeatureMatrix f = random_matrix(rng, 3, 6);
    const FeatureMatrix pooled = pool_window_features(h, f);
    REQUIRE(pooled.rows == 1);
    for (std::size_t c = 0; c < 6; ++c) {
      const double want =
          std::max({f.at(0, c), f.at(1, c), f.at(2, c)});
      CHECK(pooled.at(0, c) == want);
    }
  }

  SUBCASE("permuting patches in a window leaves the pool unchanged") {
    Hierarchy h;
    h.window_centers.points = {Point3{0, 0, 0}};
    h.patch_centers.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    h.window_members = {{2, 0, 1}};
    h.window_of_patch = {0, 0, 0};
    Hierarchy h2 = h;
    h2.window_members = {{1, 2, 0}};
    const FeatureMatrix f = random_matrix(rng, 3, 6);
    CHECK(pool_window_features(h, f).data ==
          pool_window_features(h2, f).data);
  }

  SUBCASE("identical windows produce identical features") {
    Hierarchy h;
    h.window_centers.points = {Point3{0, 0, 0}, Point3{0, 0, 0}};
    h.patch_centers.points = {{0, 0, 0}, {1, 1, 0}, {0, 0, 0}, {1, 1, 0}};
    h.window_members = {{0, 1}, {2, 3}};
    h.window_of_patch = {0, 0, 1, 1};
    FeatureMatrix f(4, 6);
    std::mt19937_64 rng2(62);
    FeatureMatrix half = random_matrix(rng2, 2, 6);
    for (std::size_t c = 0; c < 6; ++c) {
      f.at(0, c) = half.at(0, c);
      f.at(1, c) = half.at(1, c);
      f.at(2, c) = half.at(0, c);
      f.at(3, c) = half.at(1, c);
    }
    const PipelineConfig cfg = fast_config();
    const AttentionParams wparams = AttentionParams::seeded(
        6, 2, 4, 4, 5, "window_test");
    const auto [wu, wv] = window_features(h, h, f, f, wparams, cfg);
    for (std::size_t c = 0; c < 6; ++c) {
      CHECK(wu.at(0, c) == doctest::Approx(wu.at(1, c)).epsilon(1e-12));
      CHECK(wv.at(0, c) == doctest::Approx(wv.at(1, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("geometry-disjoint scenes fail in the matching stage") {
  // A flat slab against a volumetric blob: descriptors share no structure,
  // so every candidate point pair loses to the dustbin.
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> uni(-6.0, 6.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PointCloud flat, blob;
  for (int i = 0; i < 1500; ++i)
    flat.points.push_back({uni(rng), uni(rng), 0.0});
  for (int i = 0; i < 1500; ++i) {
    blob.points.push_back(
        {3.0 * gauss(rng), 3.0 * gauss(rng), 6.0 + 2.0 * gauss(rng)});
  }
  const PipelineConfig cfg = fast_config();
  const ModelParams params = seeded_model(cfg.model_dims(), cfg.seed);
  try {
    register_pair(flat, blob, cfg, params);
    FAIL("expected a PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.stage == "matching");
  }
}

TEST_CASE("diagnostics carry stage timings and counts") {
  const PointCloud scene = generate_scene(26, 1200, 8.0);
  const PipelineConfig cfg = fast_config();
  const ModelParams params = seeded_model(cfg.model_dims(), cfg.seed);
  const RegistrationResult r = register_pair(scene, scene, cfg, params);
  const std::string kv = r.diagnostics.to_key_values();
  CHECK(kv.find("hierarchy_ms=") != std::string::npos);
  CHECK(kv.find("patches_src=") != std::string::npos);
  CHECK(kv.find("point_pairs=") != std::string::npos);
  CHECK(kv.find("total_ms=") != std::string::npos);
  const std::string json = r.diagnostics.to_json_lines();
  CHECK(json.find("{\"windows_src\": ") != std::string::npos);
}
