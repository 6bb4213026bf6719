#include "diffreg/bench/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "diffreg/bench/synthetic.hpp"
#include "diffreg/core/errors.hpp"
#include "diffreg/core/rng.hpp"
#include "diffreg/pipeline/pipeline.hpp"

namespace diffreg {

std::vector<FramePair> make_synthetic_pairs(int count, std::uint64_t seed,
                                            double noise_sigma, int min_points,
                                            int max_points, double extent) {
  std::vector<FramePair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t pair_seed =
        stream_seed(seed, "bench.pair" + std::to_string(i));
    std::mt19937_64 rng = named_rng(pair_seed, "bench.points");
    std::uniform_int_distribution<int> count_dist(min_points, max_points);

    FramePair p;
    p.tag = "pair" + std::to_string(i);
    const PointCloud scene =
        generate_scene(pair_seed, count_dist(rng), extent);
    p.ground_truth = generate_synthetic_transform(pair_seed);
    p.source = scene;
    p.target = apply_transform(scene, p.ground_truth);
    if (noise_sigma > 0.0) {
      p.source = add_gaussian_noise(p.source, noise_sigma, pair_seed + 1);
      p.target = add_gaussian_noise(p.target, noise_sigma, pair_seed + 2);
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

BenchmarkReport aggregate_outcomes(std::vector<PairOutcome> outcomes,
                                   double rr_rte_cm, double rr_rre_deg) {
  BenchmarkReport report;
  report.per_pair = std::move(outcomes);

  double rte_abs = 0.0, rte_sq = 0.0, rre_abs = 0.0, rre_sq = 0.0;
  double runtime = 0.0;
  int ok_count = 0, recalled = 0;
  for (const PairOutcome& out : report.per_pair) {
    if (!out.ok) {
      ++report.failures;
      continue;
    }
    ++ok_count;
    rte_abs += out.metrics.rte_cm;
    rte_sq += out.metrics.rte_cm * out.metrics.rte_cm;
    rre_abs += out.metrics.rre_deg;
    rre_sq += out.metrics.rre_deg * out.metrics.rre_deg;
    runtime += out.runtime_ms;
    if (out.metrics.rte_cm <= rr_rte_cm && out.metrics.rre_deg <= rr_rre_deg)
      ++recalled;
  }
  if (ok_count > 0) {
    report.rte_mae_cm = rte_abs / ok_count;
    report.rte_rmse_cm = std::sqrt(rte_sq / ok_count);
    report.rre_mae_deg = rre_abs / ok_count;
    report.rre_rmse_deg = std::sqrt(rre_sq / ok_count);
    report.mean_runtime_ms = runtime / ok_count;
  }
  // Failures stay in the denominator.
  report.recall_pct = report.per_pair.empty()
                          ? 0.0
                          : 100.0 * recalled /
                                static_cast<double>(report.per_pair.size());
  return report;
}

BenchmarkReport run_benchmark(const std::vector<FramePair>& pairs,
                              const PipelineConfig& cfg,
                              const ModelParams& params) {
  if (pairs.empty()) throw ConfigError("run_benchmark: no pairs");

  std::vector<PairOutcome> outcomes(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) break;
      PairOutcome& out = outcomes[i];
      out.tag = pairs[i].tag;
      try {
        const RegistrationResult r =
            register_pair(pairs[i].source, pairs[i].target, cfg, params);
        out.metrics = compute_metrics(r.transform, pairs[i].ground_truth);
        out.runtime_ms = r.total_ms;
        out.ok = true;
      } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };

  const int workers = std::max(1, cfg.bench_workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  return aggregate_outcomes(std::move(outcomes), cfg.rr_rte_cm,
                            cfg.rr_rre_deg);
}

void write_report_csv(const BenchmarkReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("write_report_csv: cannot open " + path);
  out << "pair_id,rte_cm,rre_deg,runtime_ms,status\n";
  out.precision(6);
  for (const PairOutcome& p : report.per_pair) {
    if (p.ok) {
      out << p.tag << ',' << p.metrics.rte_cm << ',' << p.metrics.rre_deg
          << ',' << p.runtime_ms << ",ok\n";
    } else {
      out << p.tag << ",,,," << "failed\n";
    }
  }
}

void write_cdf_csv(const BenchmarkReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("write_cdf_csv: cannot open " + path);
  out << "metric,value,cumulative_probability\n";
  out.precision(6);

  auto dump = [&](const char* name, auto select) {
    std::vector<double> values;
    for (const PairOutcome& p : report.per_pair)
      if (p.ok) values.push_back(select(p));
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i)
      out << name << ',' << values[i] << ','
          << static_cast<double>(i + 1) / static_cast<double>(values.size())
          << '\n';
  };
  dump("rte_cm", [](const PairOutcome& p) { return p.metrics.rte_cm; });
  dump("rre_deg", [](const PairOutcome& p) { return p.metrics.rre_deg; });
}

}  // namespace diffreg
