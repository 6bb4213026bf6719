#include <algorithm>
#include <cstring>

#include "kernel_table.hpp"

// Reference kernels. These define the semantics the AVX2 variants must
// reproduce (up to reduction reordering).
namespace diffreg::simd::detail {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double max_value_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void elementwise_max_scalar(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = std::max(acc[i], x[i]);
}

// ikj loop order: the inner update is a row-wide axpy, contiguous in B and C.
void gemm_nn_scalar(const double* A, const double* B, double* C, std::size_t n,
                    std::size_t k, std::size_t m, bool accumulate) {
  if (!accumulate) std::memset(C, 0, n * m * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    double* c_row = C + i * m;
    const double* a_row = A + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double a = a_row[kk];
      const double* b_row = B + kk * m;
      for (std::size_t j = 0; j < m; ++j) c_row[j] += a * b_row[j];
    }
  }
}

void gemm_nt_scalar(const double* A, const double* B, double* C, std::size_t n,
                    std::size_t k, std::size_t m, bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* a_row = A + i * k;
    double* c_row = C + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = dot_scalar(a_row, B + j * k, k);
      c_row[j] = accumulate ? c_row[j] + v : v;
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      axpy_scalar,        scale_scalar,   dot_scalar,
      squared_distance_scalar, sum_scalar, max_value_scalar,
      elementwise_max_scalar,  gemm_nn_scalar, gemm_nt_scalar,
  };
  return table;
}

}  // namespace diffreg::simd::detail
