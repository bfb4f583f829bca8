#pragma once

#include <string>
#include <vector>

#include "freeway/harness/config.hpp"
#include "freeway/harness/metrics.hpp"

namespace freeway::harness {

struct TrainResult {
  std::string metrics_path;
  std::string params_path;
  std::string config_path;
  std::vector<MetricsRecord> records;
};

// Runs cfg.episodes training episodes: per policy step observe, pick an
// epsilon-greedy action, step the world, store the transition, train once.
// Episode e spawns from split(master_seed, 2 + e). Writes metrics.csv,
// params.qnet and config.resolved.ini under cfg.out_dir. A non-finite loss
// aborts with a diagnostic file next to the outputs.
TrainResult train(const RunConfig& cfg);

struct EvalResult {
  std::string metrics_path;
  std::string actions_path;
  std::vector<MetricsRecord> records;
  double mean_norm_reward = 0.0;
  double collision_rate = 0.0;
};

// cfg.eval_episodes greedy episodes (no exploration, no learning) on fresh
// scenarios from the evaluation seed stream, with a per-step action log.
EvalResult evaluate(const std::string& params_path, const RunConfig& cfg);

// Uniform-random policy over the same scenario streams; the comparison
// baseline. `eval_schedule` selects the evaluation seed stream instead of the
// training one.
std::vector<MetricsRecord> random_baseline(const RunConfig& cfg, int episodes,
                                           bool eval_schedule = false);

struct VariantSummary {
  std::string variant;
  int episodes = 0;
  double mean_norm_reward = 0.0;
  double median_norm_reward = 0.0;
  double min_norm_reward = 0.0;
  double max_norm_reward = 0.0;
  double mean_speed = 0.0;
  Quartiles distance;
  double collision_rate = 0.0;
  double eval_mean_norm_reward = 0.0;
  double eval_collision_rate = 0.0;
};

struct ComparisonReport {
  std::vector<VariantSummary> variants;  // dql, ddql, dueling, per
  std::vector<std::string> metric_paths;
  std::string summary_path;
  std::string baseline_path;
};

// Trains and evaluates all four variants with the identical scenario seed
// schedule (same master seed), in parallel, then emits per-variant CSVs, a
// random-policy baseline CSV and a combined summary.
ComparisonReport compare(const RunConfig& base);

// Summary statistics over one variant's records (exposed for tests).
VariantSummary summarize(const std::string& variant, const std::vector<MetricsRecord>& train_records,
                         const std::vector<MetricsRecord>& eval_records);

}  // namespace freeway::harness
