#include "diffreg/losses/losses.hpp"

#include <cmath>

#include "diffreg/core/errors.hpp"

namespace diffreg {

double circle_loss_patch(const FeatureMatrix& distances,
                         const FeatureMatrix& overlaps,
                         const CircleLossConfig& cfg) {
  if (distances.rows != overlaps.rows || distances.dim != overlaps.dim)
    throw ShapeMismatch("circle_loss_patch: shape mismatch");

  double total = 0.0;
  int anchors = 0;
  for (std::size_t i = 0; i < distances.rows; ++i) {
    double pos_sum = 0.0, neg_sum = 0.0;
    bool has_positive = false;
    for (std::size_t j = 0; j < distances.dim; ++j) {
      const double overlap = overlaps.at(i, j);
      if (overlap < 0.0 || overlap > 1.0)
        throw ConfigError("circle_loss_patch: overlap outside [0,1]");
      const double d = distances.at(i, j);
      if (overlap > cfg.positive_overlap) {
        has_positive = true;
        pos_sum +=
            std::exp(overlap * cfg.scale * (d - cfg.positive_margin));
      } else if (overlap == 0.0) {
        neg_sum += std::exp(cfg.scale * (cfg.negative_margin - d));
      }
    }
    if (!has_positive) continue;
    total += std::log1p(pos_sum * neg_sum);
    ++anchors;
  }
  if (anchors == 0)
    throw NoPositivePairs("circle_loss_patch: no anchor has a positive pair");
  return total / static_cast<double>(anchors);
}

NllResult nll_point_loss(const FeatureMatrix& assignment,
                         const std::vector<std::pair<int, int>>& gt_pairs,
                         const std::vector<int>& unmatched_src,
                         const std::vector<int>& unmatched_dst) {
  constexpr double kFloor = 1e-12;
  const std::size_t dust_row = assignment.rows - 1;
  const std::size_t dust_col = assignment.dim - 1;

  NllResult result;
  double total = 0.0;
  std::size_t terms = 0;
  auto score = [&](std::size_t i, std::size_t j) {
    double p = assignment.at(i, j);
    if (p <= 0.0) {
      p = kFloor;
      ++result.clamped;
    }
    total -= std::log(p);
    ++terms;
  };

  for (const auto& [i, j] : gt_pairs)
    score(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  for (int i : unmatched_src) score(static_cast<std::size_t>(i), dust_col);
  for (int j : unmatched_dst) score(dust_row, static_cast<std::size_t>(j));

  if (terms == 0) throw ConfigError("nll_point_loss: no ground-truth entries");
  result.loss = total / static_cast<double>(terms);
  return result;
}

TotalLoss total_loss(double l_patch, double l_point, const LossWeights& w) {
  TotalLoss out;
  const double ep = std::exp(-w.varpi);
  const double er = std::exp(-w.varrho);
  out.value = ep * l_patch + w.varpi + er * l_point + w.varrho;
  out.d_varpi = 1.0 - ep * l_patch;
  out.d_varrho = 1.0 - er * l_point;
  return out;
}

}  // namespace diffreg
