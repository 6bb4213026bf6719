#pragma once

#include <span>
#include <vector>

#include "diffreg/core/matrix.hpp"

namespace diffreg {

// Exact k-nearest-neighbor adjacency over matrix rows. Each node has
// min(k, n-1) neighbors, no self-loops, distances ascending; equal distances
// resolve to the lower index.
struct KnnGraph {
  std::size_t n = 0;
  int k = 0;  // effective neighbors per node
  std::vector<int> neighbors;     // n * k
  std::vector<double> distances;  // n * k, Euclidean

  std::span<const int> neighbors_of(std::size_t i) const {
    return {neighbors.data() + i * k, static_cast<std::size_t>(k)};
  }
  std::span<const double> distances_of(std::size_t i) const {
    return {distances.data() + i * k, static_cast<std::size_t>(k)};
  }
};

KnnGraph build_knn_graph(const FeatureMatrix& positions, int k);

}  // namespace diffreg
