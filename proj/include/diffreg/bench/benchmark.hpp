#pragma once

#include <string>
#include <vector>

#include "diffreg/core/geometry.hpp"
#include "diffreg/io/model_file.hpp"
#include "diffreg/pipeline/config.hpp"

namespace diffreg {

struct FramePair {
  PointCloud source;
  PointCloud target;
  RigidTransform ground_truth;
  std::string tag;
};

struct PairOutcome {
  std::string tag;
  ErrorMetrics metrics;
  double runtime_ms = 0.0;
  bool ok = false;
  std::string error;
};

struct BenchmarkReport {
  std::vector<PairOutcome> per_pair;
  double rte_mae_cm = 0.0, rte_rmse_cm = 0.0;
  double rre_mae_deg = 0.0, rre_rmse_deg = 0.0;
  double recall_pct = 0.0;  // at the config thresholds, over ALL pairs
  int failures = 0;
  double mean_runtime_ms = 0.0;
};

// Scene i: generate_scene -> synthetic transform -> optional independent
// noise on both sides.
std::vector<FramePair> make_synthetic_pairs(int count, std::uint64_t seed,
                                            double noise_sigma,
                                            int min_points = 2000,
                                            int max_points = 5000,
                                            double extent = 10.0);

// MAE/RMSE over successful pairs; recall keeps every pair (including
// failures) in the denominator.
BenchmarkReport aggregate_outcomes(std::vector<PairOutcome> outcomes,
                                   double rr_rte_cm, double rr_rre_deg);

// Registers every pair (failures become counted entries, never aborts),
// aggregates MAE/RMSE over successes and recall over all pairs.
BenchmarkReport run_benchmark(const std::vector<FramePair>& pairs,
                              const PipelineConfig& cfg,
                              const ModelParams& params);

// pair_id,rte_cm,rre_deg,runtime_ms,status
void write_report_csv(const BenchmarkReport& report, const std::string& path);
// metric,value,cumulative_probability rows for rte_cm and rre_deg.
void write_cdf_csv(const BenchmarkReport& report, const std::string& path);

}  // namespace diffreg
