#pragma once

#include <cstddef>

namespace diffreg::simd::detail {

struct KernelTable {
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max_value)(const double*, std::size_t);
  void (*elementwise_max)(double*, const double*, std::size_t);
  void (*gemm_nn)(const double*, const double*, double*, std::size_t,
                  std::size_t, std::size_t, bool);
  void (*gemm_nt)(const double*, const double*, double*, std::size_t,
                  std::size_t, std::size_t, bool);
};

const KernelTable& scalar_table();
// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

}  // namespace diffreg::simd::detail
