#include "diffreg/pipeline/pipeline.hpp"

#include <chrono>
#include <limits>
#include <sstream>

#include "diffreg/core/errors.hpp"
#include "diffreg/descriptor/geometric.hpp"
#include "diffreg/descriptor/positional.hpp"
#include "diffreg/diffusion/beltrami.hpp"
#include "diffreg/estimation/estimators.hpp"
#include "diffreg/matching/hierarchical.hpp"
#include "diffreg/sampling/voxel.hpp"
#include "diffreg/transformer/attention.hpp"
#include "diffreg/transformer/ode.hpp"

namespace diffreg {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

template <typename F>
auto run_stage(const char* name, Diagnostics& diag, F&& f) {
  const auto start = Clock::now();
  try {
    auto result = f();
    diag.add_ms(name, ms_since(start));
    return result;
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e.what());
  }
}

struct SideFeatures {
  Hierarchy hierarchy;
  PairedState patch_state;  // evolving (F, E) at patch level
  PairedState point_state;
};

}  // namespace

void Diagnostics::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void Diagnostics::add_count(const std::string& key, long long value) {
  entries.emplace_back(key, std::to_string(value));
}

void Diagnostics::add_ms(const std::string& stage, double ms) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << ms;
  entries.emplace_back(stage + "_ms", os.str());
}

std::string Diagnostics::to_key_values() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries) os << k << '=' << v << '\n';
  return os.str();
}

std::string Diagnostics::to_json_lines() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries) {
    // Values are numbers or plain tokens; quote strings conservatively.
    bool numeric = !v.empty();
    for (char c : v)
      if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
            c == '-' || c == '+' || c == 'e'))
        numeric = false;
    os << "{\"" << k << "\": " << (numeric ? v : "\"" + v + "\"") << "}\n";
  }
  return os.str();
}

FeatureMatrix pool_window_features(const Hierarchy& h,
                                   const FeatureMatrix& patch_features) {
  FeatureMatrix out(h.window_centers.size(), patch_features.dim);
  for (std::size_t w = 0; w < h.window_members.size(); ++w) {
    double* row = out.row(w);
    bool first = true;
    for (int p : h.window_members[w]) {
      const double* patch = patch_features.row(static_cast<std::size_t>(p));
      if (first) {
        std::copy(patch, patch + patch_features.dim, row);
        first = false;
      } else {
        for (std::size_t c = 0; c < patch_features.dim; ++c)
          row[c] = std::max(row[c], patch[c]);
      }
    }
  }
  return out;
}

std::pair<FeatureMatrix, FeatureMatrix> window_features(
    const Hierarchy& hier_u, const Hierarchy& hier_v,
    const FeatureMatrix& patch_f_u, const FeatureMatrix& patch_f_v,
    const AttentionParams& params, const PipelineConfig& cfg) {
  if (hier_u.window_centers.empty() || hier_v.window_centers.empty())
    throw EmptyLevel("window_features: no windows");

  const PairedState su{
      pool_window_features(hier_u, patch_f_u),
      encode_positions(hier_u.window_centers, patch_f_u.dim, cfg.alpha,
                       cfg.patch_position_base_frequency)};
  const PairedState sv{
      pool_window_features(hier_v, patch_f_v),
      encode_positions(hier_v.window_centers, patch_f_v.dim, cfg.alpha,
                       cfg.patch_position_base_frequency)};

  const FeatureMatrix att_u = self_attention(su, params);
  const FeatureMatrix att_v = self_attention(sv, params);
  const FeatureMatrix blk_u = self_attention_block(su, params);
  const FeatureMatrix blk_v = self_attention_block(sv, params);
  const FeatureMatrix cross_u = cross_attention(
      PairedState{att_u, su.positions}, blk_v, sv.positions, params);
  const FeatureMatrix cross_v = cross_attention(
      PairedState{att_v, sv.positions}, blk_u, su.positions, params);
  return {add(att_u, cross_u), add(att_v, cross_v)};
}

RegistrationResult register_pair(const PointCloud& source,
                                 const PointCloud& target,
                                 const PipelineConfig& cfg,
                                 const ModelParams& params) {
  const auto t0 = Clock::now();
  RegistrationResult result;
  Diagnostics& diag = result.diagnostics;

  if (source.empty() || target.empty())
    throw PipelineError("input", "empty cloud");

  // Outlier removal
  PointCloud src = source, dst = target;
  if (cfg.outlier_removal) {
    std::tie(src, dst) = run_stage("outlier_removal", diag, [&] {
      return std::make_pair(
          radius_outlier_removal(source, cfg.ror_radius, cfg.ror_min_neighbors),
          radius_outlier_removal(target, cfg.ror_radius,
                                 cfg.ror_min_neighbors));
    });
    diag.add_count("outliers_removed_src",
                   static_cast<long long>(source.size() - src.size()));
    diag.add_count("outliers_removed_dst",
                   static_cast<long long>(target.size() - dst.size()));
  }

  // Hierarchy
  auto side_hierarchy = [&](const PointCloud& cloud) {
    return build_hierarchy(cloud, cfg.voxel_point, cfg.voxel_patch,
                           cfg.voxel_window, cfg.gamma);
  };
  SideFeatures u, v;
  std::tie(u.hierarchy, v.hierarchy) = run_stage("hierarchy", diag, [&] {
    return std::make_pair(side_hierarchy(src), side_hierarchy(dst));
  });
  diag.add_count("windows_src",
                 static_cast<long long>(u.hierarchy.window_centers.size()));
  diag.add_count("windows_dst",
                 static_cast<long long>(v.hierarchy.window_centers.size()));
  diag.add_count("patches_src",
                 static_cast<long long>(u.hierarchy.patch_centers.size()));
  diag.add_count("patches_dst",
                 static_cast<long long>(v.hierarchy.patch_centers.size()));
  diag.add_count("points_src",
                 static_cast<long long>(u.hierarchy.points.size()));
  diag.add_count("points_dst",
                 static_cast<long long>(v.hierarchy.points.size()));
  diag.add_count("dropped_src",
                 static_cast<long long>(u.hierarchy.dropped_points));
  diag.add_count("dropped_dst",
                 static_cast<long long>(v.hierarchy.dropped_points));

  // Descriptors and positional encodings
  long long sparse_points = 0;
  auto encode_side = [&](SideFeatures& s) {
    // Patch descriptors draw their neighborhoods from the dense point level.
    const GeometricEncoding patch_enc = encode_geometric(
        s.hierarchy.patch_centers, s.hierarchy.points,
        cfg.patch_descriptor_radius, cfg.patch_dim, params.descriptor_seed);
    const GeometricEncoding point_enc = encode_geometric(
        s.hierarchy.points, cfg.point_descriptor_radius, cfg.point_dim,
        params.descriptor_seed);
    sparse_points += static_cast<long long>(point_enc.sparse_points.size()) +
                     static_cast<long long>(patch_enc.sparse_points.size());
    s.patch_state = PairedState{
        patch_enc.features,
        encode_positions(s.hierarchy.patch_centers, cfg.patch_dim, cfg.alpha,
                         cfg.patch_position_base_frequency)};
    s.point_state = PairedState{
        point_enc.features,
        encode_positions(s.hierarchy.points, cfg.point_dim, cfg.point_alpha,
                         cfg.point_position_base_frequency)};
    return 0;
  };
  run_stage("encode", diag, [&] {
    encode_side(u);
    encode_side(v);
    return 0;
  });
  diag.add_count("sparse_descriptor_points", sparse_points);

  // Beltrami diffusion at both levels
  if (cfg.use_beltrami) {
    run_stage("diffusion", diag, [&] {
      const DiffusionParams patch_params =
          cfg.solver_settings(params.patch_diffusion);
      const DiffusionParams point_params =
          cfg.solver_settings(params.point_diffusion);
      DiffusionResult ru = diffuse(u.patch_state, patch_params);
      DiffusionResult rv = diffuse(v.patch_state, patch_params);
      diag.add_count("diffusion_steps_patch_src",
                     ru.stats.accepted_steps);
      diag.add_count("diffusion_steps_patch_dst",
                     rv.stats.accepted_steps);
      u.patch_state = std::move(ru.state);
      v.patch_state = std::move(rv.state);
      DiffusionResult pu = diffuse(u.point_state, point_params);
      DiffusionResult pv = diffuse(v.point_state, point_params);
      diag.add_count("diffusion_steps_point_src",
                     pu.stats.accepted_steps);
      diag.add_count("diffusion_steps_point_dst",
                     pv.stats.accepted_steps);
      u.point_state = std::move(pu.state);
      v.point_state = std::move(pv.state);
      return 0;
    });
  }

  // Window features
  FeatureMatrix wf_u, wf_v;
  if (cfg.use_window_stage) {
    std::tie(wf_u, wf_v) = run_stage("window", diag, [&] {
      return window_features(u.hierarchy, v.hierarchy, u.patch_state.features,
                             v.patch_state.features, params.window_attention,
                             cfg);
    });
  }

  // Feature-position transformer ODE at patch level
  if (cfg.use_ode_transformer) {
    run_stage("transformer", diag, [&] {
      TransformerOdeResult r = transformer_ode(
          u.patch_state, v.patch_state, params.transformer,
          cfg.transformer_ode);
      diag.add_count("transformer_steps", r.stats.accepted_steps);
      u.patch_state = std::move(r.u);
      v.patch_state = std::move(r.v);
      return 0;
    });
  }

  // Hierarchical matching
  const HierarchicalMatchResult match = run_stage("matching", diag, [&] {
    return hierarchical_match(wf_u, wf_v, u.patch_state.features,
                              v.patch_state.features, u.point_state.features,
                              v.point_state.features, u.hierarchy,
                              v.hierarchy, cfg.matching, cfg.use_window_stage);
  });
  diag.add_count("window_pairs",
                 static_cast<long long>(match.windows.pairs.size()));
  diag.add_count("patch_pairs",
                 static_cast<long long>(match.patches.pairs.size()));
  diag.add_count("point_pairs",
                 static_cast<long long>(match.points.pairs.size()));
  diag.add_count("empty_patch_pairs", match.empty_patches);

  // Estimation
  result.transform = run_stage("estimation", diag, [&] {
    switch (cfg.estimator.method) {
      case EstimatorMethod::kLgr:
        return estimate_lgr(match.points, match.patches, u.hierarchy,
                            v.hierarchy, cfg.estimator);
      case EstimatorMethod::kRansac:
        return estimate_ransac(match.points, u.hierarchy.points,
                               v.hierarchy.points, cfg.estimator);
      case EstimatorMethod::kSvd:
        return estimate_svd(match.points, u.hierarchy.points,
                            v.hierarchy.points);
      case EstimatorMethod::kIcp:
        return estimate_icp(u.hierarchy.points, v.hierarchy.points,
                            RigidTransform::identity(), cfg.estimator);
    }
    throw ConfigError("register_pair: unknown estimator");
  });

  result.point_correspondences = match.points;
  result.patch_correspondences = match.patches;
  result.window_correspondences = match.windows;
  result.total_ms = ms_since(t0);
  diag.add_ms("total", result.total_ms);
  return result;
}

}  // namespace diffreg
