#include "diffreg/estimation/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "diffreg/core/errors.hpp"
#include "diffreg/core/rng.hpp"
#include "diffreg/spatial/kdtree.hpp"

namespace diffreg {
namespace {

struct PairView {
  std::vector<Point3> src, dst;
  std::vector<double> weights;
};

PairView collect(const CorrespondenceSet& pairs, const PointCloud& src,
                 const PointCloud& dst) {
  PairView v;
  v.src.reserve(pairs.pairs.size());
  v.dst.reserve(pairs.pairs.size());
  v.weights.reserve(pairs.pairs.size());
  for (const Correspondence& c : pairs.pairs) {
    v.src.push_back(src.points[static_cast<std::size_t>(c.i)]);
    v.dst.push_back(dst.points[static_cast<std::size_t>(c.j)]);
    v.weights.push_back(c.score);
  }
  return v;
}

int count_inliers(const RigidTransform& t, const PairView& v, double radius) {
  const double r2 = radius * radius;
  int count = 0;
  for (std::size_t l = 0; l < v.src.size(); ++l)
    if ((t(v.src[l]) - v.dst[l]).squared_norm() < r2) ++count;
  return count;
}

std::vector<int> inlier_indices(const RigidTransform& t, const PairView& v,
                                double radius) {
  const double r2 = radius * radius;
  std::vector<int> idx;
  for (std::size_t l = 0; l < v.src.size(); ++l)
    if ((t(v.src[l]) - v.dst[l]).squared_norm() < r2)
      idx.push_back(static_cast<int>(l));
  return idx;
}

RigidTransform fit_subset(const PairView& v, const std::vector<int>& idx,
                          bool use_scores) {
  std::vector<Point3> s, d;
  std::vector<double> w;
  s.reserve(idx.size());
  d.reserve(idx.size());
  w.reserve(idx.size());
  for (int l : idx) {
    s.push_back(v.src[static_cast<std::size_t>(l)]);
    d.push_back(v.dst[static_cast<std::size_t>(l)]);
    w.push_back(use_scores ? v.weights[static_cast<std::size_t>(l)] : 1.0);
  }
  return weighted_svd_fit(s, d, w);
}

// Shared inlier-refinement loop: refit on the current global inlier set,
// keep the previous transform whenever the count would drop. Inliers are
// weighted by score times a Tukey-style falloff in their residual, so pairs
// hovering at the radius boundary barely influence the fit.
RigidTransform refine(RigidTransform t, const PairView& v, double radius,
                      int iters, bool use_scores) {
  int best_count = count_inliers(t, v, radius);
  for (int it = 0; it < iters; ++it) {
    const std::vector<int> inliers = inlier_indices(t, v, radius);
    if (static_cast<int>(inliers.size()) < 3) break;

    std::vector<Point3> s, d;
    std::vector<double> w;
    s.reserve(inliers.size());
    d.reserve(inliers.size());
    w.reserve(inliers.size());
    for (int l : inliers) {
      const auto idx = static_cast<std::size_t>(l);
      const double res = (t(v.src[idx]) - v.dst[idx]).norm() / radius;
      const double falloff = (1.0 - res * res) * (1.0 - res * res);
      s.push_back(v.src[idx]);
      d.push_back(v.dst[idx]);
      w.push_back((use_scores ? v.weights[idx] : 1.0) * falloff);
    }
    RigidTransform candidate;
    try {
      candidate = weighted_svd_fit(s, d, w);
    } catch (const DegenerateConfiguration&) {
      break;
    }
    const int count = count_inliers(candidate, v, radius);
    if (count < best_count) break;
    t = candidate;
    best_count = count;
  }
  return t;
}

}  // namespace

EstimatorMethod estimator_method_from_string(const std::string& name) {
  if (name == "lgr") return EstimatorMethod::kLgr;
  if (name == "ransac") return EstimatorMethod::kRansac;
  if (name == "svd") return EstimatorMethod::kSvd;
  if (name == "icp") return EstimatorMethod::kIcp;
  throw ConfigError("unknown estimator method: " + name);
}

std::string to_string(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::kLgr: return "lgr";
    case EstimatorMethod::kRansac: return "ransac";
    case EstimatorMethod::kSvd: return "svd";
    case EstimatorMethod::kIcp: return "icp";
  }
  return "unknown";
}

RigidTransform estimate_lgr(const CorrespondenceSet& point_pairs,
                            const CorrespondenceSet& patch_pairs,
                            const Hierarchy& hier_u, const Hierarchy& hier_v,
                            const EstimatorConfig& cfg) {
  if (point_pairs.pairs.size() < 3)
    throw InsufficientPairs("estimate_lgr: need at least 3 point pairs");
  const PairView view = collect(point_pairs, hier_u.points, hier_v.points);

  // Group point pairs by the (source patch, target patch) they belong to;
  // with exclusive membership that is the pair's originating patch pair.
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (std::size_t l = 0; l < point_pairs.pairs.size(); ++l) {
    const Correspondence& c = point_pairs.pairs[l];
    const int pu = hier_u.patch_of_point[static_cast<std::size_t>(c.i)];
    const int pv = hier_v.patch_of_point[static_cast<std::size_t>(c.j)];
    groups[{pu, pv}].push_back(static_cast<int>(l));
  }

  RigidTransform best;
  int best_count = -1;
  bool any_candidate = false;
  for (const Correspondence& pp : patch_pairs.pairs) {
    const auto it = groups.find({pp.i, pp.j});
    if (it == groups.end() || it->second.size() < 3) continue;
    RigidTransform candidate;
    try {
      candidate = fit_subset(view, it->second, true);
    } catch (const DegenerateConfiguration&) {
      continue;
    }
    any_candidate = true;
    const int count = count_inliers(candidate, view, cfg.inlier_radius);
    if (count > best_count) {
      best_count = count;
      best = candidate;
    }
  }

  if (!any_candidate) {
    // Degenerate candidate set: fall back to one global weighted fit.
    try {
      std::vector<int> all(view.src.size());
      for (std::size_t l = 0; l < all.size(); ++l)
        all[l] = static_cast<int>(l);
      best = fit_subset(view, all, true);
    } catch (const DegenerateConfiguration&) {
      throw AllCandidatesDegenerate(
          "estimate_lgr: every candidate fit is degenerate");
    }
  }
  return refine(best, view, cfg.inlier_radius, cfg.lgr_refine_iters, true);
}

RigidTransform estimate_ransac(const CorrespondenceSet& point_pairs,
                               const PointCloud& src, const PointCloud& dst,
                               const EstimatorConfig& cfg) {
  const int sample = cfg.ransac_sample;
  if (static_cast<int>(point_pairs.pairs.size()) < sample)
    throw InsufficientPairs("estimate_ransac: fewer pairs than sample size");
  const PairView view = collect(point_pairs, src, dst);
  const std::size_t n = view.src.size();

  std::mt19937_64 rng = named_rng(cfg.seed, "ransac");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  RigidTransform best;
  int best_count = -1;
  std::vector<int> idx(static_cast<std::size_t>(sample));
  for (int it = 0; it < cfg.ransac_iters; ++it) {
    for (int s = 0; s < sample; ++s) {
      bool fresh;
      do {
        idx[static_cast<std::size_t>(s)] = static_cast<int>(pick(rng));
        fresh = true;
        for (int t = 0; t < s; ++t)
          if (idx[static_cast<std::size_t>(t)] ==
              idx[static_cast<std::size_t>(s)])
            fresh = false;
      } while (!fresh);
    }
    RigidTransform candidate;
    try {
      candidate = fit_subset(view, idx, false);
    } catch (const DegenerateConfiguration&) {
      continue;
    }
    const int count = count_inliers(candidate, view, cfg.inlier_radius);
    if (count > best_count) {
      best_count = count;
      best = candidate;
    }
  }
  if (best_count < 0)
    throw AllCandidatesDegenerate("estimate_ransac: no valid hypothesis");

  // Final refit on the best consensus set, locally optimized the same way
  // as the LGR refinement.
  return refine(best, view, cfg.inlier_radius,
                std::max(3, cfg.lgr_refine_iters), false);
}

RigidTransform estimate_svd(const CorrespondenceSet& point_pairs,
                            const PointCloud& src, const PointCloud& dst) {
  if (point_pairs.pairs.size() < 3)
    throw InsufficientPairs("estimate_svd: need at least 3 point pairs");
  const PairView view = collect(point_pairs, src, dst);
  return weighted_svd_fit(view.src, view.dst, view.weights);
}

RigidTransform estimate_icp(const PointCloud& src, const PointCloud& dst,
                            const RigidTransform& initial,
                            const EstimatorConfig& cfg) {
  if (src.size() < 3 || dst.size() < 3)
    throw InsufficientPairs("estimate_icp: clouds must have >= 3 points");

  const KdTree tree(dst.points);
  RigidTransform t = initial;
  double prev_residual = std::numeric_limits<double>::max();
  int rising = 0;

  std::vector<Point3> moved(src.size());
  std::vector<Point3> matched(src.size());
  std::vector<double> weights(src.size(), 1.0);

  for (int it = 0; it < cfg.icp_max_iters; ++it) {
    double residual = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      moved[i] = t(src.points[i]);
      matched[i] = dst.points[static_cast<std::size_t>(tree.nearest(moved[i]))];
      residual += (moved[i] - matched[i]).norm();
    }
    residual /= static_cast<double>(src.size());

    if (residual > prev_residual) {
      if (++rising >= 5)
        throw Divergence("estimate_icp: residual rose 5 iterations in a row");
    } else {
      rising = 0;
    }
    prev_residual = residual;

    const RigidTransform delta = weighted_svd_fit(moved, matched, weights);
    t = compose(delta, t);

    double delta_norm = (delta.translation).norm();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        const double e = delta.rotation(r, c) - (r == c ? 1.0 : 0.0);
        delta_norm += std::abs(e);
      }
    if (delta_norm < cfg.icp_tol) break;
  }
  return t;
}

}  // namespace diffreg
