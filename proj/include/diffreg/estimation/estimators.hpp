#pragma once

#include <cstdint>
#include <string>

#include "diffreg/core/geometry.hpp"
#include "diffreg/matching/correlation.hpp"
#include "diffreg/sampling/hierarchy.hpp"

namespace diffreg {

enum class EstimatorMethod { kLgr, kRansac, kSvd, kIcp };

struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::kLgr;
  double inlier_radius = 0.3;  // meters
  int lgr_refine_iters = 5;
  int ransac_iters = 5000;
  int ransac_sample = 3;
  int icp_max_iters = 50;
  double icp_tol = 1e-6;
  std::uint64_t seed = 0;
};

EstimatorMethod estimator_method_from_string(const std::string& name);
std::string to_string(EstimatorMethod m);

// Local-to-global registration: one candidate transform per corresponded
// patch pair (weighted SVD on its member point pairs, scores as weights),
// scored by global inlier count, then refined on the global inlier set with
// monotone acceptance.
RigidTransform estimate_lgr(const CorrespondenceSet& point_pairs,
                            const CorrespondenceSet& patch_pairs,
                            const Hierarchy& hier_u, const Hierarchy& hier_v,
                            const EstimatorConfig& cfg);

// Seeded hypothesize-and-verify with minimal SVD fits and a final refit on
// the best inlier set.
RigidTransform estimate_ransac(const CorrespondenceSet& point_pairs,
                               const PointCloud& src, const PointCloud& dst,
                               const EstimatorConfig& cfg);

// Weighted SVD over all pairs (scores as weights).
RigidTransform estimate_svd(const CorrespondenceSet& point_pairs,
                            const PointCloud& src, const PointCloud& dst);

// Point-to-point ICP from an initial transform. Throws Divergence when the
// mean residual increases five consecutive iterations.
RigidTransform estimate_icp(const PointCloud& src, const PointCloud& dst,
                            const RigidTransform& initial,
                            const EstimatorConfig& cfg);

}  // namespace diffreg
