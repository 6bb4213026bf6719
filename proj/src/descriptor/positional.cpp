#include "diffreg/descriptor/positional.hpp"

#include <cmath>

#include "diffreg/core/errors.hpp"

namespace diffreg {

FeatureMatrix encode_positions(const PointCloud& cloud, std::size_t dim,
                               double alpha, double base_frequency) {
  if (!(alpha > 0.0)) throw ConfigError("encode_positions: alpha must be > 0");
  if (dim < 6) throw ConfigError("encode_positions: dim must be >= 6");

  const std::size_t octaves = dim / 6;
  FeatureMatrix out(cloud.size(), dim);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double* row = out.row(i);
    std::size_t c = 0;
    for (int axis = 0; axis < 3; ++axis) {
      const double v = cloud.points[i][axis];
      double freq = base_frequency;
      for (std::size_t m = 0; m < octaves; ++m, freq *= 2.0) {
        const double phase = 2.0 * M_PI * freq * v;
        row[c++] = alpha * std::sin(phase);
        row[c++] = alpha * std::cos(phase);
      }
    }
    // remaining dim - 6*octaves entries stay zero
  }
  return out;
}

double max_encoding_frequency(std::size_t dim, double base_frequency) {
  const std::size_t octaves = dim / 6;
  return base_frequency * std::pow(2.0, static_cast<double>(octaves - 1));
}

}  // namespace diffreg
