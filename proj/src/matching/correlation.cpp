#include "diffreg/matching/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diffreg/core/errors.hpp"
#include "diffreg/simd/kernels.hpp"

namespace diffreg {
namespace {

// log sum_k exp(x_k) with the usual max shift.
double log_sum_exp(const double* x, std::size_t n, std::size_t stride) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, x[k * stride]);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::exp(x[k * stride] - m);
  return m + std::log(s);
}

}  // namespace

FeatureMatrix dual_normalized_correlation(const FeatureMatrix& f_u,
                                          const FeatureMatrix& f_v) {
  if (f_u.dim != f_v.dim)
    throw ShapeMismatch("dual_normalized_correlation: feature dims differ");
  const std::size_t n = f_u.rows, m = f_v.rows;

  FeatureMatrix neg_d2(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = neg_d2.row(i);
    for (std::size_t j = 0; j < m; ++j)
      row[j] = -simd::squared_distance(f_u.row(i), f_v.row(j), f_u.dim);
  }

  std::vector<double> row_lse(n), col_lse(m);
  for (std::size_t i = 0; i < n; ++i)
    row_lse[i] = log_sum_exp(neg_d2.row(i), m, 1);
  for (std::size_t j = 0; j < m; ++j)
    col_lse[j] = log_sum_exp(neg_d2.data.data() + j, n, m);

  FeatureMatrix w(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      w.at(i, j) =
          std::exp(2.0 * neg_d2.at(i, j) - row_lse[i] - col_lse[j]);
  return w;
}

CorrespondenceSet topk_select(const FeatureMatrix& w, int n_pairs,
                              MatchLevel level) {
  return topk_select(w, n_pairs, level, nullptr);
}

CorrespondenceSet topk_select(
    const FeatureMatrix& w, int n_pairs, MatchLevel level,
    const std::function<bool(int, int)>& allowed) {
  if (n_pairs < 1) throw ConfigError("topk_select: n_pairs must be >= 1");

  std::vector<Correspondence> entries;
  entries.reserve(w.rows * w.dim);
  for (std::size_t i = 0; i < w.rows; ++i)
    for (std::size_t j = 0; j < w.dim; ++j) {
      if (allowed && !allowed(static_cast<int>(i), static_cast<int>(j)))
        continue;
      entries.push_back(
          {static_cast<int>(i), static_cast<int>(j), w.at(i, j)});
    }

  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(n_pairs), entries.size());
  auto cmp = [](const Correspondence& a, const Correspondence& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  };
  std::partial_sort(entries.begin(), entries.begin() + take, entries.end(),
                    cmp);
  entries.resize(take);

  CorrespondenceSet out;
  out.level = level;
  out.pairs = std::move(entries);
  out.threshold = out.pairs.empty() ? 0.0 : out.pairs.back().score;
  return out;
}

}  // namespace diffreg
