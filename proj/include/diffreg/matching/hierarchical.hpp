#pragma once

#include "diffreg/core/matrix.hpp"
#include "diffreg/matching/correlation.hpp"
#include "diffreg/sampling/hierarchy.hpp"

namespace diffreg {

struct MatchingConfig {
  int window_topk = 16;
  int patch_pairs = 128;  // N_p
  int point_topk = 3;     // mutual per-row Top-K
  int sinkhorn_iterations = 50;
  bool sinkhorn_dustbin = true;
  // Both the cosine scores and the dustbin constant are multiplied by
  // cosine_scale before Sinkhorn, so dustbin_score reads as a cosine-level
  // acceptance threshold.
  double dustbin_score = 0.5;
  double cosine_scale = 32.0;
  // Assignment-mass floor: a point whose mass spreads over many equivalent
  // partners (ambiguous geometry) stays unmatched.
  double min_point_score = 0.35;
  // Window/patch features are scaled by this gain before the dual-normalized
  // correlation; larger gains sharpen its selectivity.
  double correlation_gain = 16.0;
};

struct PointMatchResult {
  CorrespondenceSet points;
  int empty_patches = 0;
};

// Per corresponded patch pair: cosine similarity over member point features,
// Sinkhorn, then mutual Top-K; pooled across patch pairs with duplicates
// keeping the max score, sorted by (i, j).
PointMatchResult match_points_in_patches(const CorrespondenceSet& patch_pairs,
                                         const Hierarchy& hier_u,
                                         const Hierarchy& hier_v,
                                         const FeatureMatrix& f_u_points,
                                         const FeatureMatrix& f_v_points,
                                         const MatchingConfig& cfg);

struct HierarchicalMatchResult {
  CorrespondenceSet windows;
  CorrespondenceSet patches;
  CorrespondenceSet points;
  int empty_patches = 0;
};

// Window-level dual-normalized matching gates the candidate patch pairs;
// patch-level matching gates point matching. Throws NoCorrespondence when a
// stage comes up empty. Window features may be empty matrices when
// use_window_gate is false (ablation), in which case every patch pair is a
// candidate.
HierarchicalMatchResult hierarchical_match(
    const FeatureMatrix& window_f_u, const FeatureMatrix& window_f_v,
    const FeatureMatrix& patch_f_u, const FeatureMatrix& patch_f_v,
    const FeatureMatrix& point_f_u, const FeatureMatrix& point_f_v,
    const Hierarchy& hier_u, const Hierarchy& hier_v,
    const MatchingConfig& cfg, bool use_window_gate = true);

}  // namespace diffreg
