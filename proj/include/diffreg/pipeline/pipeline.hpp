#pragma once

#include <string>
#include <utility>
#include <vector>

#include "diffreg/core/geometry.hpp"
#include "diffreg/core/matrix.hpp"
#include "diffreg/io/model_file.hpp"
#include "diffreg/matching/correlation.hpp"
#include "diffreg/pipeline/config.hpp"
#include "diffreg/sampling/hierarchy.hpp"

namespace diffreg {

struct Diagnostics {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value);
  void add_count(const std::string& key, long long value);
  void add_ms(const std::string& stage, double ms);
  std::string to_key_values() const;
  std::string to_json_lines() const;
};

struct RegistrationResult {
  RigidTransform transform;
  CorrespondenceSet point_correspondences;
  CorrespondenceSet patch_correspondences;
  CorrespondenceSet window_correspondences;
  Diagnostics diagnostics;
  double total_ms = 0.0;
};

// End-to-end: outlier removal, hierarchy, descriptors/positions, Beltrami
// diffusion (patch and point level), window gating, transformer ODE,
// hierarchical matching, estimation. Stage errors surface as PipelineError
// with the stage tag.
RegistrationResult register_pair(const PointCloud& source,
                                 const PointCloud& target,
                                 const PipelineConfig& cfg,
                                 const ModelParams& params);

// Elementwise max over the member-patch feature rows of each window.
FeatureMatrix pool_window_features(const Hierarchy& h,
                                   const FeatureMatrix& patch_features);

// Pooled member-patch features passed through one self/cross attention round
// between the two sides.
std::pair<FeatureMatrix, FeatureMatrix> window_features(
    const Hierarchy& hier_u, const Hierarchy& hier_v,
    const FeatureMatrix& patch_f_u, const FeatureMatrix& patch_f_v,
    const AttentionParams& params, const PipelineConfig& cfg);

}  // namespace diffreg
