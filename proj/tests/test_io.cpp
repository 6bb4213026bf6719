#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "diffreg/core/errors.hpp"
#include "diffreg/io/config.hpp"
#include "diffreg/io/feature_io.hpp"
#include "diffreg/io/kitti.hpp"
#include "diffreg/io/model_file.hpp"
#include "diffreg/io/ply.hpp"
#include "diffreg/pipeline/config.hpp"
#include "test_support.hpp"

using namespace diffreg;
using test::random_matrix;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("diffreg_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("kitti bin format") {
  TempDir dir;

  SUBCASE("known 32-byte payload decodes to two points") {
    const float payload[8] = {1.5f, -2.0f, 0.25f, 0.9f,
                              -4.0f, 8.5f, 3.0f, 0.1f};
    std::ofstream out(dir.file("two.bin"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(payload), 32);
    out.close();

    const PointCloud c = read_kitti_bin(dir.file("two.bin"));
    REQUIRE(c.size() == 2);
    CHECK(c.points[0].x == 1.5);
    CHECK(c.points[0].y == -2.0);
    CHECK(c.points[1].z == 3.0);
    REQUIRE(c.has_intensity());
    CHECK(c.intensity[0] == 0.9f);
  }

  SUBCASE("empty file raises EmptyCloud") {
    std::ofstream(dir.file("empty.bin"), std::ios::binary).flush();
    CHECK_THROWS_AS(read_kitti_bin(dir.file("empty.bin")), EmptyCloud);
  }

  SUBCASE("misaligned size raises MalformedFile") {
    std::ofstream out(dir.file("bad.bin"), std::ios::binary);
    const char junk[21] = {};
    out.write(junk, 21);
    out.close();
    CHECK_THROWS_AS(read_kitti_bin(dir.file("bad.bin")), MalformedFile);
  }

  SUBCASE("missing file raises IoFailure") {
    CHECK_THROWS_AS(read_kitti_bin(dir.file("nope.bin")), IoFailure);
  }

  SUBCASE("write-then-read round trip is bit identical") {
    std::mt19937_64 rng(3);
    PointCloud cloud;
    std::uniform_real_distribution<float> uni(-50.0f, 50.0f);
    for (int i = 0; i < 100; ++i) {
      // Values representable in f32 so the round trip is exact.
      cloud.points.push_back({static_cast<double>(uni(rng)),
                              static_cast<double>(uni(rng)),
                              static_cast<double>(uni(rng))});
      cloud.intensity.push_back(uni(rng));
    }
    write_kitti_bin(cloud, dir.file("rt.bin"));
    const PointCloud back = read_kitti_bin(dir.file("rt.bin"));
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      CHECK(back.points[i].x == cloud.points[i].x);
      CHECK(back.points[i].y == cloud.points[i].y);
      CHECK(back.points[i].z == cloud.points[i].z);
      CHECK(back.intensity[i] == cloud.intensity[i]);
    }
  }
}

TEST_CASE("feature matrix file round trip") {
  TempDir dir;
  std::mt19937_64 rng(5);
  FeatureMatrix m = random_matrix(rng, 17, 9);
  // Quantize to f32 first so equality is exact.
  for (double& v : m.data) v = static_cast<double>(static_cast<float>(v));
  write_feature_matrix(m, dir.file("m.fmat"));
  const FeatureMatrix back = read_feature_matrix(dir.file("m.fmat"));
  CHECK(back.rows == m.rows);
  CHECK(back.dim == m.dim);
  CHECK(back.data == m.data);

  std::ofstream bad(dir.file("bad.fmat"), std::ios::binary);
  bad.write("NOPE", 4);
  bad.close();
  CHECK_THROWS_AS(read_feature_matrix(dir.file("bad.fmat")), MalformedFile);
}

TEST_CASE("model params file") {
  TempDir dir;
  const ModelDims dims{32, 16, 2, 8, 8};

  SUBCASE("seeded models are reproducible from the seed alone") {
    const ModelParams a = seeded_model(dims, 421);
    const ModelParams b = seeded_model(dims, 421);
    CHECK(a.patch_diffusion.w1 == b.patch_diffusion.w1);
    CHECK(a.transformer.self_heads[0].wq == b.transformer.self_heads[0].wq);
    const ModelParams c = seeded_model(dims, 422);
    CHECK(a.patch_diffusion.w1 != c.patch_diffusion.w1);
  }

  SUBCASE("save/load round trip is bit exact") {
    const ModelParams a = seeded_model(dims, 99);
    save_model(a, dir.file("w.pdnw"));
    const ModelParams b = load_model(dir.file("w.pdnw"));
    CHECK(b.seed == a.seed);
    CHECK(b.descriptor_seed == a.descriptor_seed);
    CHECK(b.patch_diffusion.w1 == a.patch_diffusion.w1);
    CHECK(b.patch_diffusion.b2 == a.patch_diffusion.b2);
    CHECK(b.patch_diffusion.t_final == a.patch_diffusion.t_final);
    CHECK(b.patch_diffusion.rtol == a.patch_diffusion.rtol);
    CHECK(b.point_diffusion.w2 == a.point_diffusion.w2);
    CHECK(b.transformer.heads == a.transformer.heads);
    for (int h = 0; h < a.transformer.heads; ++h) {
      CHECK(b.transformer.self_heads[static_cast<std::size_t>(h)].wek ==
            a.transformer.self_heads[static_cast<std::size_t>(h)].wek);
      CHECK(b.transformer.cross_heads[static_cast<std::size_t>(h)].wv ==
            a.transformer.cross_heads[static_cast<std::size_t>(h)].wv);
    }
    CHECK(b.transformer.fc_w2 == a.transformer.fc_w2);
    CHECK(b.window_attention.comb_w1 == a.window_attention.comb_w1);
  }

  SUBCASE("magic is validated") {
    std::ofstream bad(dir.file("bad.pdnw"), std::ios::binary);
    bad.write("XXXX\x01\x00", 6);
    bad.close();
    CHECK_THROWS_AS(load_model(dir.file("bad.pdnw")), MalformedFile);
  }
}

TEST_CASE("ply writer emits a well-formed header") {
  TempDir dir;
  PointCloud c;
  c.points = {{1, 2, 3}, {4, 5, 6}};
  write_ply(c, dir.file("c.ply"));
  std::ifstream in(dir.file("c.ply"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "ply");
  std::getline(in, line);
  CHECK(line == "format ascii 1.0");
  std::getline(in, line);
  CHECK(line == "element vertex 2");
}

TEST_CASE("key=value config parsing") {
  std::istringstream in(
      "# comment\n"
      "voxel_point = 0.25\n"
      "\n"
      "method=ransac  # inline comment\n"
      "seed=123\n");
  const KeyValues kv = parse_key_values(in);
  CHECK(kv.at("voxel_point") == "0.25");
  CHECK(kv.at("method") == "ransac");

  PipelineConfig cfg;
  cfg.apply(kv);
  CHECK(cfg.voxel_point == 0.25);
  CHECK(cfg.estimator.method == EstimatorMethod::kRansac);
  CHECK(cfg.seed == 123);
  CHECK(cfg.estimator.seed == 123);

  CHECK_THROWS_AS(cfg.apply({{"not_a_key", "1"}}), ConfigError);
  CHECK_THROWS_AS(cfg.apply({{"voxel_point", "abc"}}), ConfigError);

  std::istringstream broken("this line has no equals\n");
  CHECK_THROWS_AS(parse_key_values(broken), ConfigError);
}

TEST_CASE("config dump round-trips through apply") {
  PipelineConfig cfg;
  cfg.voxel_point = 0.21;
  cfg.matching.patch_pairs = 77;
  cfg.estimator.method = EstimatorMethod::kIcp;
  cfg.use_beltrami = false;

  std::istringstream in(cfg.to_key_values());
  PipelineConfig back;
  back.apply(parse_key_values(in));
  CHECK(back.voxel_point == cfg.voxel_point);
  CHECK(back.matching.patch_pairs == 77);
  CHECK(back.estimator.method == EstimatorMethod::kIcp);
  CHECK(back.use_beltrami == false);
  CHECK(back.to_key_values() == cfg.to_key_values());
}
