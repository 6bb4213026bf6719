#pragma once

#include <cstdint>
#include <string>

#include "diffreg/estimation/estimators.hpp"
#include "diffreg/io/config.hpp"
#include "diffreg/io/model_file.hpp"
#include "diffreg/matching/hierarchical.hpp"
#include "diffreg/transformer/params.hpp"

namespace diffreg {

// Every tunable in one place; defaults are desk scale. All keys are settable
// through the flat key=value config file.
struct PipelineConfig {
  // outlier removal
  bool outlier_removal = true;
  double ror_radius = 1.5;
  int ror_min_neighbors = 2;

  // hierarchy
  double voxel_point = 0.3;
  double voxel_patch = 2.4;
  double voxel_window = 9.6;
  double gamma = 2.0;

  // descriptors / positions
  std::size_t patch_dim = 64;
  std::size_t point_dim = 16;
  double patch_descriptor_radius = 4.8;
  double point_descriptor_radius = 1.2;
  double alpha = 1.0;        // positional scale, patch/window level
  double point_alpha = 0.3;  // positional scale, point level
  // Positional spectra per level: wavelengths must sit above the cross-frame
  // center jitter of the level, so coarse levels use lower base frequencies.
  double patch_position_base_frequency = 0.0003;
  double point_position_base_frequency = 0.01;

  // diffusion (both levels share solver settings; weights differ per level)
  int knn_k = 15;
  double diffusion_t_final = 1.0;
  double diffusion_rtol = 0.01;
  double diffusion_atol = 0.01;
  double diffusion_tau = 1.0;

  // transformer
  int heads = 4;
  std::size_t head_dim = 32;
  std::size_t pos_dim = 32;
  OdeConfig transformer_ode{2.0, 0.01, 0.01};

  MatchingConfig matching;
  EstimatorConfig estimator;

  // ablation switches
  bool use_window_stage = true;
  bool use_beltrami = true;
  bool use_ode_transformer = true;

  // benchmark
  double rr_rte_cm = 60.0;
  double rr_rre_deg = 5.0;
  int bench_workers = 1;

  std::uint64_t seed = 7;

  ModelDims model_dims() const {
    return {patch_dim, point_dim, heads, head_dim, pos_dim};
  }
  DiffusionParams solver_settings(DiffusionParams p) const {
    p.k = knn_k;
    p.t_final = diffusion_t_final;
    p.rtol = diffusion_rtol;
    p.atol = diffusion_atol;
    p.tau = diffusion_tau;
    return p;
  }

  // Unknown keys throw ConfigError.
  void apply(const KeyValues& kv);
  static PipelineConfig from_file(const std::string& path);
  std::string to_key_values() const;
};

}  // namespace diffreg
