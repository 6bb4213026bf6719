#include "diffreg/matching/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "diffreg/core/errors.hpp"
#include "diffreg/matching/sinkhorn.hpp"
#include "diffreg/simd/kernels.hpp"

namespace diffreg {
namespace {

FeatureMatrix gather_rows(const FeatureMatrix& src,
                          const std::vector<int>& idx) {
  FeatureMatrix out(idx.size(), src.dim);
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy(src.row(static_cast<std::size_t>(idx[r])),
              src.row(static_cast<std::size_t>(idx[r])) + src.dim, out.row(r));
  return out;
}

// Row indices of the top-k entries of each row/column of p, then their
// intersection as mutual pairs.
std::vector<std::pair<int, int>> mutual_topk(const FeatureMatrix& p,
                                             std::size_t rows,
                                             std::size_t cols, int k) {
  auto top_of = [&](bool by_row) {
    std::vector<std::set<int>> sel(by_row ? rows : cols);
    std::vector<std::pair<double, int>> line;
    const std::size_t outer = by_row ? rows : cols;
    const std::size_t inner = by_row ? cols : rows;
    for (std::size_t a = 0; a < outer; ++a) {
      line.clear();
      for (std::size_t b = 0; b < inner; ++b) {
        const double v = by_row ? p.at(a, b) : p.at(b, a);
        line.emplace_back(-v, static_cast<int>(b));
      }
      const std::size_t take = std::min<std::size_t>(k, line.size());
      std::partial_sort(line.begin(), line.begin() + take, line.end());
      for (std::size_t t = 0; t < take; ++t) sel[a].insert(line[t].second);
    }
    return sel;
  };
  const auto row_sel = top_of(true);
  const auto col_sel = top_of(false);

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t r = 0; r < rows; ++r)
    for (int c : row_sel[r])
      if (col_sel[static_cast<std::size_t>(c)].count(static_cast<int>(r)))
        pairs.emplace_back(static_cast<int>(r), c);
  return pairs;
}

}  // namespace

PointMatchResult match_points_in_patches(const CorrespondenceSet& patch_pairs,
                                         const Hierarchy& hier_u,
                                         const Hierarchy& hier_v,
                                         const FeatureMatrix& f_u_points,
                                         const FeatureMatrix& f_v_points,
                                         const MatchingConfig& cfg) {
  if (patch_pairs.level != MatchLevel::kPatch)
    throw ShapeMismatch("match_points_in_patches: need patch-level pairs");

  const FeatureMatrix unit_u = normalize_rows_l2(f_u_points);
  const FeatureMatrix unit_v = normalize_rows_l2(f_v_points);

  PointMatchResult result;
  std::map<std::pair<int, int>, double> best;
  for (const Correspondence& pp : patch_pairs.pairs) {
    const std::vector<int>& mu =
        hier_u.patch_members[static_cast<std::size_t>(pp.i)];
    const std::vector<int>& mv =
        hier_v.patch_members[static_cast<std::size_t>(pp.j)];
    if (mu.empty() || mv.empty()) {
      ++result.empty_patches;
      continue;
    }

    const FeatureMatrix fu = gather_rows(unit_u, mu);
    const FeatureMatrix fv = gather_rows(unit_v, mv);
    FeatureMatrix cosine(fu.rows, fv.rows);
    simd::gemm_nt(fu.data.data(), fv.data.data(), cosine.data.data(), fu.rows,
                  fu.dim, fv.rows);
    simd::scale(cosine.data.data(), cfg.cosine_scale, cosine.data.size());

    const FeatureMatrix p =
        sinkhorn(cosine, cfg.sinkhorn_iterations, cfg.sinkhorn_dustbin,
                 cfg.cosine_scale * cfg.dustbin_score);
    for (const auto& [r, c] :
         mutual_topk(p, fu.rows, fv.rows, cfg.point_topk)) {
      const double score =
          p.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (score < cfg.min_point_score) continue;
      // A matched pair must also beat "unmatched": drop it when the dustbin
      // holds more mass for either endpoint.
      if (cfg.sinkhorn_dustbin &&
          (score <= p.at(static_cast<std::size_t>(r), fv.rows) ||
           score <= p.at(fu.rows, static_cast<std::size_t>(c))))
        continue;
      const std::pair<int, int> key{mu[static_cast<std::size_t>(r)],
                                    mv[static_cast<std::size_t>(c)]};
      auto [it, inserted] = best.emplace(key, score);
      if (!inserted) it->second = std::max(it->second, score);
    }
  }

  result.points.level = MatchLevel::kPoint;
  for (const auto& [key, score] : best)
    result.points.pairs.push_back({key.first, key.second, score});
  return result;
}

HierarchicalMatchResult hierarchical_match(
    const FeatureMatrix& window_f_u, const FeatureMatrix& window_f_v,
    const FeatureMatrix& patch_f_u, const FeatureMatrix& patch_f_v,
    const FeatureMatrix& point_f_u, const FeatureMatrix& point_f_v,
    const Hierarchy& hier_u, const Hierarchy& hier_v,
    const MatchingConfig& cfg, bool use_window_gate) {
  if (patch_f_u.rows != hier_u.patch_centers.size() ||
      patch_f_v.rows != hier_v.patch_centers.size())
    throw ShapeMismatch("hierarchical_match: patch feature rows mismatch");
  if (point_f_u.rows != hier_u.points.size() ||
      point_f_v.rows != hier_v.points.size())
    throw ShapeMismatch("hierarchical_match: point feature rows mismatch");
  if (use_window_gate &&
      (window_f_u.rows != hier_u.window_centers.size() ||
       window_f_v.rows != hier_v.window_centers.size()))
    throw ShapeMismatch("hierarchical_match: window feature rows mismatch");

  HierarchicalMatchResult result;

  // Features are rescaled so the mean row norm across both sides equals the
  // correlation gain; Eq. (10) selectivity then does not depend on the
  // magnitude conventions of the producing stage.
  auto gained = [&](const FeatureMatrix& a, const FeatureMatrix& b) {
    double norm_sum = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i)
      norm_sum += std::sqrt(simd::dot(a.row(i), a.row(i), a.dim));
    for (std::size_t i = 0; i < b.rows; ++i)
      norm_sum += std::sqrt(simd::dot(b.row(i), b.row(i), b.dim));
    const double mean = norm_sum / static_cast<double>(a.rows + b.rows);
    const double s = mean > 0.0 ? cfg.correlation_gain / mean : 1.0;
    std::pair<FeatureMatrix, FeatureMatrix> out{a, b};
    simd::scale(out.first.data.data(), s, out.first.data.size());
    simd::scale(out.second.data.data(), s, out.second.data.size());
    return out;
  };

  std::set<std::pair<int, int>> window_ok;
  if (use_window_gate) {
    const auto [wu, wv] = gained(window_f_u, window_f_v);
    const FeatureMatrix ww = dual_normalized_correlation(wu, wv);
    result.windows = topk_select(ww, cfg.window_topk, MatchLevel::kWindow);
    if (result.windows.pairs.empty())
      throw NoCorrespondence("hierarchical_match: no window pairs");
    for (const Correspondence& c : result.windows.pairs)
      window_ok.emplace(c.i, c.j);
  }

  const auto [pu, pv] = gained(patch_f_u, patch_f_v);
  const FeatureMatrix wp = dual_normalized_correlation(pu, pv);
  const auto allowed = [&](int i, int j) {
    if (!use_window_gate) return true;
    return window_ok.count(
               {hier_u.window_of_patch[static_cast<std::size_t>(i)],
                hier_v.window_of_patch[static_cast<std::size_t>(j)]}) > 0;
  };
  result.patches =
      topk_select(wp, cfg.patch_pairs, MatchLevel::kPatch, allowed);
  if (result.patches.pairs.empty())
    throw NoCorrespondence("hierarchical_match: no patch pairs");

  PointMatchResult points = match_points_in_patches(
      result.patches, hier_u, hier_v, point_f_u, point_f_v, cfg);
  result.empty_patches = points.empty_patches;
  result.points = std::move(points.points);
  if (result.points.pairs.empty())
    throw NoCorrespondence("hierarchical_match: no point pairs");
  return result;
}

}  // namespace diffreg
