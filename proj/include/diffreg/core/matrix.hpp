#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace diffreg {

// Dense row-major matrix of per-point embeddings. Rows correspond
// index-for-index to a PointCloud.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // rows * dim, row-major

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t d)
      : rows(r), dim(d), data(r * d, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * dim; }
  const double* row(std::size_t i) const { return data.data() + i * dim; }
  std::span<double> row_span(std::size_t i) { return {row(i), dim}; }
  std::span<const double> row_span(std::size_t i) const {
    return {row(i), dim};
  }
  double& at(std::size_t i, std::size_t j) { return data[i * dim + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
  bool all_finite() const;
};

// Feature block H and positional block I evolved jointly by diffusion.
struct PairedState {
  FeatureMatrix features;   // H
  FeatureMatrix positions;  // I

  std::size_t rows() const { return features.rows; }
  std::size_t dim() const { return features.dim; }
  void validate() const;  // throws ShapeMismatch
};

// Per-row mean/variance normalization with epsilon 1e-5.
FeatureMatrix row_normalize(const FeatureMatrix& x, double eps = 1e-5);
// In-place row-wise softmax.
void softmax_rows(FeatureMatrix& x);
// out = a + b elementwise (shape-checked).
FeatureMatrix add(const FeatureMatrix& a, const FeatureMatrix& b);
// Rescale rows to unit L2 norm; zero rows stay zero.
FeatureMatrix normalize_rows_l2(const FeatureMatrix& x);
// All pairwise Euclidean distances: out(i,j) = |a_i - b_j|.
FeatureMatrix pairwise_distances(const FeatureMatrix& a,
                                 const FeatureMatrix& b);
// out = x * w where w is (x.dim x out_dim) row-major.
FeatureMatrix matmul(const FeatureMatrix& x, const std::vector<double>& w,
                     std::size_t out_dim);
double frobenius_norm(const FeatureMatrix& x);
double frobenius_distance(const FeatureMatrix& a, const FeatureMatrix& b);

}  // namespace diffreg
