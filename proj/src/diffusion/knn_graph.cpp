#include "diffreg/diffusion/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "diffreg/core/errors.hpp"
#include "diffreg/simd/kernels.hpp"

namespace diffreg {

KnnGraph build_knn_graph(const FeatureMatrix& positions, int k) {
  const std::size_t n = positions.rows;
  if (n < 2) throw ConfigError("build_knn_graph: need at least 2 rows");
  if (k < 1) throw ConfigError("build_knn_graph: k must be >= 1");

  KnnGraph g;
  g.n = n;
  g.k = std::min<int>(k, static_cast<int>(n) - 1);
  g.neighbors.resize(n * g.k);
  g.distances.resize(n * g.k);

  // |a-b|^2 = |a|^2 + |b|^2 - 2 a.b, with the cross terms as one GEMM block.
  std::vector<double> sq_norms(n);
  for (std::size_t i = 0; i < n; ++i)
    sq_norms[i] = simd::dot(positions.row(i), positions.row(i), positions.dim);

  constexpr std::size_t kBlock = 256;
  std::vector<double> cross(kBlock * n);
  std::vector<std::pair<double, int>> row(n);

  for (std::size_t b0 = 0; b0 < n; b0 += kBlock) {
    const std::size_t bn = std::min(kBlock, n - b0);
    simd::gemm_nt(positions.row(b0), positions.data.data(), cross.data(), bn,
                  positions.dim, n);
    for (std::size_t bi = 0; bi < bn; ++bi) {
      const std::size_t i = b0 + bi;
      const double* ci = cross.data() + bi * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double d2 =
            std::max(0.0, sq_norms[i] + sq_norms[j] - 2.0 * ci[j]);
        row[j] = {d2, static_cast<int>(j)};
      }
      row[i].first = std::numeric_limits<double>::infinity();  // no self-loop
      std::partial_sort(row.begin(), row.begin() + g.k, row.end());
      for (int m = 0; m < g.k; ++m) {
        g.neighbors[i * g.k + m] = row[m].second;
        g.distances[i * g.k + m] = std::sqrt(row[m].first);
      }
      // partial_sort on (d2, index) pairs already breaks ties by index
    }
  }
  return g;
}

}  // namespace diffreg
