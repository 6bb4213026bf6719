#pragma once

#include <cstddef>

// Data-parallel kernels used by the hot loops (feature distances, attention
// GEMMs, EdgeConv aggregation, RK stage updates). Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant selected at
// runtime. The two are equivalence-tested in tests/test_simd.cpp.
namespace diffreg::simd {

enum class Backend { kScalar, kAvx2 };

// Backend active for all kernel calls. Detected once at first use; the
// DIFFREG_SIMD environment variable ("scalar", "avx2", "auto") overrides.
Backend active_backend();
const char* backend_name(Backend b);
// Returns false if the requested backend is unsupported on this CPU.
bool set_backend(Backend b);
bool backend_supported(Backend b);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
// x[i] *= a
void scale(double* x, double a, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
// sum_i (a[i] - b[i])^2
double squared_distance(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
// acc[i] = max(acc[i], x[i])
void elementwise_max(double* acc, const double* x, std::size_t n);

// Row-major GEMM variants sized for attention projections and logit blocks.
// C (n x m) = A (n x k) * B (k x m); accumulate adds into C instead.
void gemm_nn(const double* A, const double* B, double* C, std::size_t n,
             std::size_t k, std::size_t m, bool accumulate = false);
// C (n x m) = A (n x k) * B^T where B is (m x k) row-major.
void gemm_nt(const double* A, const double* B, double* C, std::size_t n,
             std::size_t k, std::size_t m, bool accumulate = false);

}  // namespace diffreg::simd
