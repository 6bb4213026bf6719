#include <algorithm>
#include <cstring>

#include "kernel_table.hpp"

#if defined(DIFFREG_HAVE_AVX2_TU)
#include <immintrin.h>

namespace diffreg::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double* x, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  double r = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double r = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double max_value_avx2(const double* x, std::size_t n) {
  if (n < 8) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
  }
  __m256d acc = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]),
                      std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void elementwise_max_avx2(double* acc, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m =
        _mm256_max_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(acc + i, m);
  }
  for (; i < n; ++i) acc[i] = std::max(acc[i], x[i]);
}

void gemm_nn_avx2(const double* A, const double* B, double* C, std::size_t n,
                  std::size_t k, std::size_t m, bool accumulate) {
  if (!accumulate) std::memset(C, 0, n * m * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    double* c_row = C + i * m;
    const double* a_row = A + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const __m256d a = _mm256_set1_pd(a_row[kk]);
      const double* b_row = B + kk * m;
      std::size_t j = 0;
      for (; j + 8 <= m; j += 8) {
        __m256d c0 = _mm256_loadu_pd(c_row + j);
        __m256d c1 = _mm256_loadu_pd(c_row + j + 4);
        c0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(b_row + j), c0);
        c1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(b_row + j + 4), c1);
        _mm256_storeu_pd(c_row + j, c0);
        _mm256_storeu_pd(c_row + j + 4, c1);
      }
      for (; j + 4 <= m; j += 4) {
        __m256d c0 = _mm256_loadu_pd(c_row + j);
        c0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(b_row + j), c0);
        _mm256_storeu_pd(c_row + j, c0);
      }
      const double a_s = a_row[kk];
      for (; j < m; ++j) c_row[j] += a_s * b_row[j];
    }
  }
}

void gemm_nt_avx2(const double* A, const double* B, double* C, std::size_t n,
                  std::size_t k, std::size_t m, bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* a_row = A + i * k;
    double* c_row = C + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = dot_avx2(a_row, B + j * k, k);
      c_row[j] = accumulate ? c_row[j] + v : v;
    }
  }
}

}  // namespace

const KernelTable* avx2_table() {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
    return nullptr;
  static const KernelTable table = {
      axpy_avx2,        scale_avx2,   dot_avx2,
      squared_distance_avx2, sum_avx2, max_value_avx2,
      elementwise_max_avx2,  gemm_nn_avx2, gemm_nt_avx2,
  };
  return &table;
}

}  // namespace diffreg::simd::detail

#else  // !DIFFREG_HAVE_AVX2_TU

namespace diffreg::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace diffreg::simd::detail

#endif
