#include "diffreg/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernel_table.hpp"

namespace diffreg::simd {
namespace {

std::atomic<const detail::KernelTable*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::kScalar};

const detail::KernelTable* detect() {
  const char* env = std::getenv("DIFFREG_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) {
    g_backend.store(Backend::kScalar);
    return &detail::scalar_table();
  }
  const detail::KernelTable* avx2 = detail::avx2_table();
  if (avx2 && (!env || std::strcmp(env, "scalar") != 0)) {
    g_backend.store(Backend::kAvx2);
    return avx2;
  }
  g_backend.store(Backend::kScalar);
  return &detail::scalar_table();
}

inline const detail::KernelTable& table() {
  const detail::KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

}  // namespace

Backend active_backend() {
  table();
  return g_backend.load();
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  if (b == Backend::kScalar) return true;
  return detail::avx2_table() != nullptr;
}

bool set_backend(Backend b) {
  if (b == Backend::kScalar) {
    g_active.store(&detail::scalar_table());
    g_backend.store(Backend::kScalar);
    return true;
  }
  const detail::KernelTable* avx2 = detail::avx2_table();
  if (!avx2) return false;
  g_active.store(avx2);
  g_backend.store(Backend::kAvx2);
  return true;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  table().axpy(a, x, y, n);
}
void scale(double* x, double a, std::size_t n) { table().scale(x, a, n); }
double dot(const double* a, const double* b, std::size_t n) {
  return table().dot(a, b, n);
}
double squared_distance(const double* a, const double* b, std::size_t n) {
  return table().squared_distance(a, b, n);
}
double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double max_value(const double* x, std::size_t n) {
  return table().max_value(x, n);
}
void elementwise_max(double* acc, const double* x, std::size_t n) {
  table().elementwise_max(acc, x, n);
}
void gemm_nn(const double* A, const double* B, double* C, std::size_t n,
             std::size_t k, std::size_t m, bool accumulate) {
  table().gemm_nn(A, B, C, n, k, m, accumulate);
}
void gemm_nt(const double* A, const double* B, double* C, std::size_t n,
             std::size_t k, std::size_t m, bool accumulate) {
  table().gemm_nt(A, B, C, n, k, m, accumulate);
}

}  // namespace diffreg::simd
