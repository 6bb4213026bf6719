#include "diffreg/pipeline/config.hpp"

#include <sstream>

#include "diffreg/core/errors.hpp"

namespace diffreg {
namespace {

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("expected boolean, got '" + v + "'");
}

}  // namespace

void PipelineConfig::apply(const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    try {
      if (key == "outlier_removal") outlier_removal = parse_bool(value);
      else if (key == "ror_radius") ror_radius = std::stod(value);
      else if (key == "ror_min_neighbors") ror_min_neighbors = std::stoi(value);
      else if (key == "voxel_point") voxel_point = std::stod(value);
      else if (key == "voxel_patch") voxel_patch = std::stod(value);
      else if (key == "voxel_window") voxel_window = std::stod(value);
      else if (key == "gamma") gamma = std::stod(value);
      else if (key == "patch_dim") patch_dim = std::stoul(value);
      else if (key == "point_dim") point_dim = std::stoul(value);
      else if (key == "patch_descriptor_radius")
        patch_descriptor_radius = std::stod(value);
      else if (key == "point_descriptor_radius")
        point_descriptor_radius = std::stod(value);
      else if (key == "alpha") alpha = std::stod(value);
      else if (key == "point_alpha") point_alpha = std::stod(value);
      else if (key == "patch_position_base_frequency")
        patch_position_base_frequency = std::stod(value);
      else if (key == "point_position_base_frequency")
        point_position_base_frequency = std::stod(value);
      else if (key == "knn_k") knn_k = std::stoi(value);
      else if (key == "diffusion_t_final") diffusion_t_final = std::stod(value);
      else if (key == "diffusion_rtol") diffusion_rtol = std::stod(value);
      else if (key == "diffusion_atol") diffusion_atol = std::stod(value);
      else if (key == "diffusion_tau") diffusion_tau = std::stod(value);
      else if (key == "heads") heads = std::stoi(value);
      else if (key == "head_dim") head_dim = std::stoul(value);
      else if (key == "pos_dim") pos_dim = std::stoul(value);
      else if (key == "transformer_t_final")
        transformer_ode.t_final = std::stod(value);
      else if (key == "transformer_rtol") transformer_ode.rtol = std::stod(value);
      else if (key == "transformer_atol") transformer_ode.atol = std::stod(value);
      else if (key == "window_topk") matching.window_topk = std::stoi(value);
      else if (key == "patch_pairs") matching.patch_pairs = std::stoi(value);
      else if (key == "point_topk") matching.point_topk = std::stoi(value);
      else if (key == "sinkhorn_iterations")
        matching.sinkhorn_iterations = std::stoi(value);
      else if (key == "sinkhorn_dustbin")
        matching.sinkhorn_dustbin = parse_bool(value);
      else if (key == "dustbin_score") matching.dustbin_score = std::stod(value);
      else if (key == "cosine_scale") matching.cosine_scale = std::stod(value);
      else if (key == "min_point_score")
        matching.min_point_score = std::stod(value);
      else if (key == "correlation_gain")
        matching.correlation_gain = std::stod(value);
      else if (key == "method")
        estimator.method = estimator_method_from_string(value);
      else if (key == "inlier_radius") estimator.inlier_radius = std::stod(value);
      else if (key == "lgr_refine_iters")
        estimator.lgr_refine_iters = std::stoi(value);
      else if (key == "ransac_iters") estimator.ransac_iters = std::stoi(value);
      else if (key == "ransac_sample") estimator.ransac_sample = std::stoi(value);
      else if (key == "icp_max_iters") estimator.icp_max_iters = std::stoi(value);
      else if (key == "icp_tol") estimator.icp_tol = std::stod(value);
      else if (key == "use_window_stage") use_window_stage = parse_bool(value);
      else if (key == "use_beltrami") use_beltrami = parse_bool(value);
      else if (key == "use_ode_transformer")
        use_ode_transformer = parse_bool(value);
      else if (key == "rr_rte_cm") rr_rte_cm = std::stod(value);
      else if (key == "rr_rre_deg") rr_rre_deg = std::stod(value);
      else if (key == "bench_workers") bench_workers = std::stoi(value);
      else if (key == "seed") seed = std::stoull(value);
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad value for config key '" + key + "': " + value);
    } catch (const std::out_of_range&) {
      throw ConfigError("out-of-range value for config key '" + key + "'");
    }
  }
  estimator.seed = seed;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  PipelineConfig cfg;
  cfg.apply(read_config_file(path));
  return cfg;
}

std::string PipelineConfig::to_key_values() const {
  std::ostringstream os;
  os << "outlier_removal=" << (outlier_removal ? "true" : "false") << '\n'
     << "ror_radius=" << ror_radius << '\n'
     << "ror_min_neighbors=" << ror_min_neighbors << '\n'
     << "voxel_point=" << voxel_point << '\n'
     << "voxel_patch=" << voxel_patch << '\n'
     << "voxel_window=" << voxel_window << '\n'
     << "gamma=" << gamma << '\n'
     << "patch_dim=" << patch_dim << '\n'
     << "point_dim=" << point_dim << '\n'
     << "patch_descriptor_radius=" << patch_descriptor_radius << '\n'
     << "point_descriptor_radius=" << point_descriptor_radius << '\n'
     << "alpha=" << alpha << '\n'
     << "point_alpha=" << point_alpha << '\n'
     << "patch_position_base_frequency=" << patch_position_base_frequency
     << '\n'
     << "point_position_base_frequency=" << point_position_base_frequency
     << '\n'
     << "knn_k=" << knn_k << '\n'
     << "diffusion_t_final=" << diffusion_t_final << '\n'
     << "diffusion_rtol=" << diffusion_rtol << '\n'
     << "diffusion_atol=" << diffusion_atol << '\n'
     << "diffusion_tau=" << diffusion_tau << '\n'
     << "heads=" << heads << '\n'
     << "head_dim=" << head_dim << '\n'
     << "pos_dim=" << pos_dim << '\n'
     << "transformer_t_final=" << transformer_ode.t_final << '\n'
     << "transformer_rtol=" << transformer_ode.rtol << '\n'
     << "transformer_atol=" << transformer_ode.atol << '\n'
     << "window_topk=" << matching.window_topk << '\n'
     << "patch_pairs=" << matching.patch_pairs << '\n'
     << "point_topk=" << matching.point_topk << '\n'
     << "sinkhorn_iterations=" << matching.sinkhorn_iterations << '\n'
     << "sinkhorn_dustbin=" << (matching.sinkhorn_dustbin ? "true" : "false")
     << '\n'
     << "dustbin_score=" << matching.dustbin_score << '\n'
     << "cosine_scale=" << matching.cosine_scale << '\n'
     << "min_point_score=" << matching.min_point_score << '\n'
     << "correlation_gain=" << matching.correlation_gain << '\n'
     << "method=" << to_string(estimator.method) << '\n'
     << "inlier_radius=" << estimator.inlier_radius << '\n'
     << "lgr_refine_iters=" << estimator.lgr_refine_iters << '\n'
     << "ransac_iters=" << estimator.ransac_iters << '\n'
     << "ransac_sample=" << estimator.ransac_sample << '\n'
     << "icp_max_iters=" << estimator.icp_max_iters << '\n'
     << "icp_tol=" << estimator.icp_tol << '\n'
     << "use_window_stage=" << (use_window_stage ? "true" : "false") << '\n'
     << "use_beltrami=" << (use_beltrami ? "true" : "false") << '\n'
     << "use_ode_transformer=" << (use_ode_transformer ? "true" : "false")
     << '\n'
     << "rr_rte_cm=" << rr_rte_cm << '\n'
     << "rr_rre_deg=" << rr_rre_deg << '\n'
     << "bench_workers=" << bench_workers << '\n'
     << "seed=" << seed << '\n';
  return os.str();
}

}  // namespace diffreg
