#pragma once

#include "diffreg/core/matrix.hpp"

namespace diffreg {

// Alternating row/column normalization of exp(scores) in log space. Scores
// are logits; the result is the normalized assignment matrix. With a dustbin
// the matrix is augmented by one slack row and column at constant
// slack_score before normalization and returned including them
// ((n+1) x (m+1), dustbin last).
FeatureMatrix sinkhorn(const FeatureMatrix& scores, int iterations,
                       bool with_dustbin, double slack_score = 0.5);

}  // namespace diffreg
