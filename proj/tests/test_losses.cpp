#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "diffreg/core/errors.hpp"
#include "diffreg/losses/losses.hpp"
#include "test_support.hpp"

using namespace diffreg;
using test::random_matrix;

TEST_CASE("circle loss vanishes for well-separated pairs") {
  FeatureMatrix d(2, 2), o(2, 2);
  d.at(0, 0) = 0.0;   // positive at distance 0
  d.at(0, 1) = 10.0;  // negative far beyond the margin
  d.at(1, 1) = 0.0;
  d.at(1, 0) = 10.0;
  o.at(0, 0) = 1.0;
  o.at(1, 1) = 1.0;
  CHECK(circle_loss_patch(d, o) < 1e-3);
}

TEST_CASE("circle loss closed form log 2") {
  // Single positive at the positive margin, single negative at the negative
  // margin: both exponents vanish and the loss is log(1 + 1).
  FeatureMatrix d(1, 2), o(1, 2);
  d.at(0, 0) = 0.1;  // Delta_p
  d.at(0, 1) = 1.4;  // Delta_n
  o.at(0, 0) = 0.5;
  o.at(0, 1) = 0.0;
  CHECK(std::abs(circle_loss_patch(d, o) - std::log(2.0)) < 1e-9);
}

TEST_CASE("circle loss is invariant under feature isometries") {
  std::mt19937_64 rng(41);
  const FeatureMatrix fu = random_matrix(rng, 6, 8);
  const FeatureMatrix fv = random_matrix(rng, 7, 8);
  FeatureMatrix overlaps(6, 7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (double& v : overlaps.data) {
    const double draw = uni(rng);
    v = draw < 0.4 ? 0.0 : draw;
  }

  const double before =
      circle_loss_patch(pairwise_distances(fu, fv), overlaps);

  // Apply the same random rotation (orthonormal map) to both sides.
  std::mt19937_64 rng2(43);
  FeatureMatrix rot(8, 8);
  for (double& v : rot.data) v = std::normal_distribution<double>()(rng2);
  // Gram-Schmidt on rows.
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < 8; ++c) dot += rot.at(i, c) * rot.at(j, c);
      for (std::size_t c = 0; c < 8; ++c) rot.at(i, c) -= dot * rot.at(j, c);
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < 8; ++c) norm += rot.at(i, c) * rot.at(i, c);
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < 8; ++c) rot.at(i, c) /= norm;
  }
  const FeatureMatrix fur = matmul(fu, rot.data, 8);
  const FeatureMatrix fvr = matmul(fv, rot.data, 8);
  const double after =
      circle_loss_patch(pairwise_distances(fur, fvr), overlaps);
  CHECK(std::abs(before - after) < 1e-9);
}

TEST_CASE("circle loss requires a positive pair") {
  FeatureMatrix d(2, 2), o(2, 2);  // all overlaps zero
  CHECK_THROWS_AS(circle_loss_patch(d, o), NoPositivePairs);
}

TEST_CASE("nll point loss") {
  SUBCASE("exact permutation scores zero") {
    FeatureMatrix a(4, 4);  // 3x3 assignment + dustbin
    a.at(0, 1) = 1.0;
    a.at(1, 0) = 1.0;
    a.at(2, 2) = 1.0;
    const NllResult r =
        nll_point_loss(a, {{0, 1}, {1, 0}, {2, 2}}, {}, {});
    CHECK(r.loss == 0.0);
    CHECK(r.clamped == 0);
  }
  SUBCASE("uniform assignment scores log n") {
    const std::size_t n = 5;
    FeatureMatrix a(n + 1, n + 1);
    for (double& v : a.data) v = 1.0 / static_cast<double>(n);
    std::vector<std::pair<int, int>> gt;
    for (int i = 0; i < static_cast<int>(n); ++i) gt.emplace_back(i, i);
    const NllResult r = nll_point_loss(a, gt, {}, {});
    CHECK(r.loss ==
          doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-12));
  }
  SUBCASE("one wrong pair contributes -log p") {
    FeatureMatrix a(3, 3);
    a.at(0, 0) = 1.0;
    a.at(1, 1) = 0.125;
    const NllResult r = nll_point_loss(a, {{0, 0}, {1, 1}}, {}, {});
    CHECK(r.loss == doctest::Approx(0.5 * -std::log(0.125)).epsilon(1e-12));
  }
  SUBCASE("unmatched points score against the dustbin") {
    FeatureMatrix a(3, 3);
    a.at(0, 2) = 0.25;  // row dustbin entry for unmatched source 0
    a.at(2, 1) = 0.5;   // column dustbin for unmatched target 1
    const NllResult r = nll_point_loss(a, {}, {0}, {1});
    CHECK(r.loss == doctest::Approx(0.5 * (-std::log(0.25) - std::log(0.5)))
                        .epsilon(1e-12));
  }
  SUBCASE("zero probabilities clamp with a counter") {
    FeatureMatrix a(2, 2);
    const NllResult r = nll_point_loss(a, {{0, 0}}, {}, {});
    CHECK(r.clamped == 1);
    CHECK(r.loss == doctest::Approx(-std::log(1e-12)));
  }
}

TEST_CASE("total loss value and gradients") {
  SUBCASE("zero weights reduce to the plain sum") {
    const TotalLoss r = total_loss(1.7, 2.3, {0.0, 0.0});
    CHECK(r.value == doctest::Approx(4.0).epsilon(1e-15));
  }
  SUBCASE("gradient vanishes at varpi = ln(l_patch)") {
    const double lp = 3.7;
    const TotalLoss r = total_loss(lp, 1.0, {std::log(lp), 0.0});
    CHECK(std::abs(r.d_varpi) < 1e-12);
  }
  SUBCASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> loss_draw(0.05, 5.0);
    std::uniform_real_distribution<double> weight_draw(-1.5, 1.5);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
      const double lp = loss_draw(rng), lq = loss_draw(rng);
      const LossWeights w{weight_draw(rng), weight_draw(rng)};
      const TotalLoss r = total_loss(lp, lq, w);
      const double fd_p = (total_loss(lp, lq, {w.varpi + h, w.varrho}).value -
                           total_loss(lp, lq, {w.varpi - h, w.varrho}).value) /
                          (2 * h);
      const double fd_r =
          (total_loss(lp, lq, {w.varpi, w.varrho + h}).value -
           total_loss(lp, lq, {w.varpi, w.varrho - h}).value) /
          (2 * h);
      CHECK(std::abs(r.d_varpi - fd_p) <=
            1e-6 * std::max(1.0, std::abs(fd_p)));
      CHECK(std::abs(r.d_varrho - fd_r) <=
            1e-6 * std::max(1.0, std::abs(fd_r)));
    }
  }
  SUBCASE("convex in varpi with minimum value ln(l) + 1") {
    const double lp = 2.9;
    const double at_min = total_loss(lp, 0.0, {std::log(lp), 0.0}).value;
    CHECK(at_min == doctest::Approx(std::log(lp) + 1.0).epsilon(1e-12));
    // Second difference positive around the minimum.
    const double h = 0.1;
    const double left = total_loss(lp, 0.0, {std::log(lp) - h, 0.0}).value;
    const double right = total_loss(lp, 0.0, {std::log(lp) + h, 0.0}).value;
    CHECK(left + right - 2.0 * at_min > 0.0);
    CHECK(left > at_min);
    CHECK(right > at_min);
  }
}
