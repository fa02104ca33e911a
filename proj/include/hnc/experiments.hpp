#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hnc/bounds.hpp"
#include "hnc/config.hpp"
#include "hnc/oracle.hpp"

namespace hnc {

// Seed used by trial `trial` of a run rooted at `root`.
std::uint64_t trial_seed(std::uint64_t root, int trial);

// ---- bound sweep -----------------------------------------------------------

struct BoundInstance {
  HncModel model;
  ContextSet context;
  Vector sigma;
  RowVector u_star;
  Eigen::Index target = 0;
};

/// Random instance with d_m = d_q = `dim`, `count` contexts of which `t`
/// are copies of the target column, and u_star = z_target + dz with
/// ||dz|| ~ dz_scale.
BoundInstance random_bound_instance(std::uint64_t seed, int dim, int count, int t, double gamma, double dz_scale);

struct BoundSweepResult {
  std::vector<long long> instance_ids;
  std::vector<BoundReport> reports;
  double max_ratio = 0.0;  // max realized_error / upper_bound
  std::string csv;
};

/// Grid gamma x M x t/M, sweep.instances random instances per point. The
/// instance geometry depends on (seed, M, t/M, instance) but not on gamma.
/// Throws BoundViolation on the first breach.
BoundSweepResult run_bound_sweep(const ExperimentConfig& config);

// ---- selection studies -----------------------------------------------------

struct TrialRecord {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  Strategy strategy = Strategy::random;
  int k = 0;
  double mean_score = 0.0;
  std::vector<double> per_query_scores;
  int score_failures = 0;
  long long runtime_ms = 0;  // not written to CSV
};

/// Synthetic task, pool, queries and oracle shared by all trials of a run.
/// Task and pool come from the root seed; trials only vary selection.
struct Benchmark {
  TaskSpec spec;
  GeneratedTask data;
  std::unique_ptr<CompletionOracle> oracle;
  ScoreFunction score;
};

Benchmark make_benchmark(const ExperimentConfig& config);

/// Scores of predicting every query with the given fixed context. Rejected
/// predictions score 0 and are counted in `failures`.
std::vector<double> evaluate_context(const Benchmark& bench, const std::vector<int>& context_ids, int* failures);

struct KStudyResult {
  std::vector<TrialRecord> records;
  std::string csv;
};

/// For every trial, strategy and K: fresh selection, evaluation over all
/// queries, one record. instance-best selects per query.
KStudyResult run_k_study(const ExperimentConfig& config);

struct StrategySummary {
  Strategy strategy = Strategy::random;
  int k = 0;
  int trials = 0;
  double mean = 0.0;
  double sd = 0.0;
  // Fraction of trials beating random at the same K (ties count half).
  double win_rate_vs_random = 0.0;
};

struct ComparisonResult {
  std::vector<TrialRecord> records;
  std::vector<StrategySummary> summary;
  std::string csv;
  std::string json;
};

/// Strategies from {random, metric, active}; one summary row per (strategy, K).
ComparisonResult run_strategy_comparison(const ExperimentConfig& config);

// ---- statistics ------------------------------------------------------------

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se = 0.0;        // standard error of the mean
};

SampleStats sample_stats(const std::vector<double>& xs);

/// Mean scores per trial for one (strategy, K) arm, in trial order.
std::vector<double> arm_means(const std::vector<TrialRecord>& records, Strategy strategy, int k);

std::string trial_csv(const std::vector<TrialRecord>& records);

}  // namespace hnc
