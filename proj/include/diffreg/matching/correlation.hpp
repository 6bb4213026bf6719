#pragma once

#include <functional>
#include <vector>

#include "diffreg/core/matrix.hpp"

namespace diffreg {

enum class MatchLevel { kWindow, kPatch, kPoint };

struct Correspondence {
  int i = 0;
  int j = 0;
  double score = 0.0;
};

struct CorrespondenceSet {
  MatchLevel level = MatchLevel::kPoint;
  std::vector<Correspondence> pairs;
  double threshold = 0.0;  // score of the last selected pair (w_Np)
};

// Dual-normalized correlation:
//   w_ij = exp(-2|f_i - g_j|^2) / (sum_j exp(-|f_i - g_j|^2)
//                                  * sum_i exp(-|f_i - g_j|^2)),
// evaluated in log space so large distances cannot underflow the sums.
FeatureMatrix dual_normalized_correlation(const FeatureMatrix& f_u,
                                          const FeatureMatrix& f_v);

// n_pairs highest entries (clamped to the matrix size); ties resolve in
// (i, j) lexicographic order. The optional mask restricts candidates.
CorrespondenceSet topk_select(const FeatureMatrix& w, int n_pairs,
                              MatchLevel level = MatchLevel::kPatch);
CorrespondenceSet topk_select(
    const FeatureMatrix& w, int n_pairs, MatchLevel level,
    const std::function<bool(int, int)>& allowed);

const char* to_string(MatchLevel level);
// CSV rows of level,i,j,score.
void write_correspondences_csv(const CorrespondenceSet& set,
                               const std::string& path);

}  // namespace diffreg
