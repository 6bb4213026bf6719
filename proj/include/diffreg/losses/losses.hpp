#pragma once

#include <vector>

#include "diffreg/core/matrix.hpp"
#include "diffreg/matching/correlation.hpp"

namespace diffreg {

struct LossWeights {
  double varpi = 0.0;
  double varrho = 0.0;
};

struct CircleLossConfig {
  double positive_margin = 0.1;   // Delta_p
  double negative_margin = 1.4;   // Delta_n
  double scale = 10.0;            // beta
  double positive_overlap = 0.1;  // overlap > this makes a positive pair
};

// Overlap-aware circle loss over a patch feature-distance matrix. Positives
// are pairs with overlap above positive_overlap (weighted by their overlap
// ratio), negatives have zero overlap; anchors are source rows with at least
// one positive. Throws NoPositivePairs when no anchor qualifies.
double circle_loss_patch(const FeatureMatrix& distances,
                         const FeatureMatrix& overlaps,
                         const CircleLossConfig& cfg = {});

struct NllResult {
  double loss = 0.0;
  int clamped = 0;  // entries clamped at 1e-12
};

// Negative log-likelihood of the ground-truth assignment under a Sinkhorn
// output with dustbin (last row/column). Unmatched source/target points are
// scored against the dustbin.
NllResult nll_point_loss(const FeatureMatrix& assignment,
                         const std::vector<std::pair<int, int>>& gt_pairs,
                         const std::vector<int>& unmatched_src,
                         const std::vector<int>& unmatched_dst);

struct TotalLoss {
  double value = 0.0;
  double d_varpi = 0.0;
  double d_varrho = 0.0;
};

// L = exp(-varpi) l_patch + varpi + exp(-varrho) l_point + varrho, with
// analytic gradients for the two weights.
TotalLoss total_loss(double l_patch, double l_point, const LossWeights& w);

}  // namespace diffreg
