#include "diffreg/core/matrix.hpp"

#include <cmath>

#include "diffreg/core/errors.hpp"
#include "diffreg/simd/kernels.hpp"

namespace diffreg {

bool FeatureMatrix::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

void PairedState::validate() const {
  if (features.rows != positions.rows || features.dim != positions.dim)
    throw ShapeMismatch("PairedState: feature/position shapes differ");
}

FeatureMatrix row_normalize(const FeatureMatrix& x, double eps) {
  FeatureMatrix out(x.rows, x.dim);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* r = x.row(i);
    const double mean = simd::sum(r, x.dim) / static_cast<double>(x.dim);
    double var = 0.0;
    for (std::size_t j = 0; j < x.dim; ++j) {
      const double d = r[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(x.dim);
    const double inv = 1.0 / std::sqrt(var + eps);
    double* o = out.row(i);
    for (std::size_t j = 0; j < x.dim; ++j) o[j] = (r[j] - mean) * inv;
  }
  return out;
}

void softmax_rows(FeatureMatrix& x) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    double* r = x.row(i);
    const double m = simd::max_value(r, x.dim);
    double s = 0.0;
    for (std::size_t j = 0; j < x.dim; ++j) {
      r[j] = std::exp(r[j] - m);
      s += r[j];
    }
    const double inv = 1.0 / s;
    simd::scale(r, inv, x.dim);
  }
}

FeatureMatrix add(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows != b.rows || a.dim != b.dim)
    throw ShapeMismatch("add: shapes differ");
  FeatureMatrix out = a;
  simd::axpy(1.0, b.data.data(), out.data.data(), out.data.size());
  return out;
}

FeatureMatrix normalize_rows_l2(const FeatureMatrix& x) {
  FeatureMatrix out = x;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double* r = out.row(i);
    const double n = std::sqrt(simd::dot(r, r, x.dim));
    if (n > 0.0) simd::scale(r, 1.0 / n, x.dim);
  }
  return out;
}

FeatureMatrix pairwise_distances(const FeatureMatrix& a,
                                 const FeatureMatrix& b) {
  if (a.dim != b.dim) throw ShapeMismatch("pairwise_distances: dims differ");
  FeatureMatrix out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* o = out.row(i);
    for (std::size_t j = 0; j < b.rows; ++j)
      o[j] = std::sqrt(simd::squared_distance(a.row(i), b.row(j), a.dim));
  }
  return out;
}

FeatureMatrix matmul(const FeatureMatrix& x, const std::vector<double>& w,
                     std::size_t out_dim) {
  if (w.size() != x.dim * out_dim)
    throw ShapeMismatch("matmul: weight size mismatch");
  FeatureMatrix out(x.rows, out_dim);
  simd::gemm_nn(x.data.data(), w.data(), out.data.data(), x.rows, x.dim,
                out_dim);
  return out;
}

double frobenius_norm(const FeatureMatrix& x) {
  return std::sqrt(simd::dot(x.data.data(), x.data.data(), x.data.size()));
}

double frobenius_distance(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows != b.rows || a.dim != b.dim)
    throw ShapeMismatch("frobenius_distance: shapes differ");
  return std::sqrt(
      simd::squared_distance(a.data.data(), b.data.data(), a.data.size()));
}

}  // namespace diffreg
