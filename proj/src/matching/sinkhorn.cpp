#include "diffreg/matching/sinkhorn.hpp"

#include <cmath>
#include <limits>

#include "diffreg/core/errors.hpp"

namespace diffreg {

FeatureMatrix sinkhorn(const FeatureMatrix& scores, int iterations,
                       bool with_dustbin, double slack_score) {
  if (iterations < 1) throw ConfigError("sinkhorn: iterations must be >= 1");
  for (double v : scores.data)
    if (!std::isfinite(v))
      throw NumericalUnderflow("sinkhorn: non-finite score");

  const std::size_t n = scores.rows + (with_dustbin ? 1 : 0);
  const std::size_t m = scores.dim + (with_dustbin ? 1 : 0);
  if (scores.rows == 0 || scores.dim == 0)
    throw ShapeMismatch("sinkhorn: empty score matrix");

  FeatureMatrix logp(n, m);
  for (std::size_t i = 0; i < scores.rows; ++i)
    for (std::size_t j = 0; j < scores.dim; ++j)
      logp.at(i, j) = scores.at(i, j);
  if (with_dustbin) {
    for (std::size_t j = 0; j < m; ++j) logp.at(n - 1, j) = slack_score;
    for (std::size_t i = 0; i < n; ++i) logp.at(i, m - 1) = slack_score;
  }

  auto lse = [](const double* x, std::size_t count, std::size_t stride) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k)
      mx = std::max(mx, x[k * stride]);
    if (!std::isfinite(mx))
      throw NumericalUnderflow("sinkhorn: row/column entirely -inf");
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += std::exp(x[k * stride] - mx);
    return mx + std::log(s);
  };

  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double z = lse(logp.row(i), m, 1);
      for (std::size_t j = 0; j < m; ++j) logp.at(i, j) -= z;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double z = lse(logp.data.data() + j, n, m);
      for (std::size_t i = 0; i < n; ++i) logp.at(i, j) -= z;
    }
  }

  for (double& v : logp.data) v = std::exp(v);
  return logp;
}

}  // namespace diffreg
