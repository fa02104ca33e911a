#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hnc/oracle.hpp"
#include "hnc/score.hpp"
#include "hnc/tasks.hpp"

namespace hnc {

enum class Strategy { random, metric, active, instance_best };
enum class Metric { cosine, euclidean };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

// Number of probe terms per value estimate; nullopt means every other pool
// member.
using Subsample = std::optional<int>;
inline constexpr int kDefaultSubsample = 100;
// Probe sets are drawn from Rng(derive_seed(seed, kProbeStream)).
inline constexpr std::uint64_t kProbeStream = 0x70726f6265;

struct ValueEstimate {
  int exemplar_id = 0;
  double value = 0.0;
  int sample_count = 0;
  std::vector<double> scores;
  int score_failures = 0;
};

struct SelectionDiagnostics {
  std::optional<std::uint64_t> seed;
  std::vector<ValueEstimate> values;     // active: one per pool member, pool order
  std::vector<double> chosen_scores;     // metric closeness / instance score, aligned with chosen
  int score_failures = 0;
};

struct SelectionResult {
  std::vector<int> chosen;
  Strategy strategy = Strategy::random;
  SelectionDiagnostics diagnostics;
};

/// k distinct exemplars: the first k entries of a Fisher-Yates shuffle of
/// pool positions driven by Rng(seed), reported in pool order.
SelectionResult random_select(const ExemplarPool& pool, int k, std::uint64_t seed);

/// k nearest exemplars to `query_x` (highest cosine or lowest Euclidean
/// distance), closest first; ties by ascending id.
SelectionResult metric_select(const ExemplarPool& pool, int k, const Eigen::Ref<const Vector>& query_x, Metric metric);

/// Probe positions for a Monte-Carlo value estimate. With a subsample of s
/// the first s + 1 entries of a seeded Fisher-Yates shuffle are returned, so
/// every exemplar still has s probes after excluding itself. The set depends
/// on the seed only, so all exemplars of one selection share it.
std::vector<std::size_t> probe_positions(std::size_t pool_size, Subsample subsample, std::uint64_t seed);

/// Mean of s(F(e, x_j), y_j) over probe members j other than e, with e as
/// the sole context exemplar. A prediction the score function rejects counts
/// as 0 and is tallied in score_failures; an OracleFailure propagates with
/// exemplar and probe ids attached.
ValueEstimate value_estimate(const Exemplar& e, const ExemplarPool& pool, const CompletionOracle& oracle,
                             const ScoreFunction& score, Subsample subsample, std::uint64_t seed);

/// Top-k pool members by value_estimate (shared probe set), highest first,
/// ties by ascending id.
SelectionResult active_select(const ExemplarPool& pool, int k, const CompletionOracle& oracle,
                              const ScoreFunction& score, Subsample subsample, std::uint64_t seed);

struct RankedExemplar {
  int id = 0;
  double score = 0.0;
};

/// Every exemplar scored as the sole context for (x, y), best first, ties by
/// ascending id.
std::vector<RankedExemplar> rank_instance_best(const ExemplarPool& pool, const Eigen::Ref<const Vector>& x,
                                               const Eigen::Ref<const Vector>& y, const CompletionOracle& oracle,
                                               const ScoreFunction& score, int* failures = nullptr);

/// Evaluation-only: needs the ground truth y of the query.
SelectionResult instance_best_select(const ExemplarPool& pool, const Eigen::Ref<const Vector>& x,
                                     const Eigen::Ref<const Vector>& y, int k, const CompletionOracle& oracle,
                                     const ScoreFunction& score);

struct ModePattern {
  Vector representative;
  int count = 0;
  std::size_t first_index = 0;
  std::vector<int> cluster_sizes;  // in order of first appearance
};

/// Greedy clustering: each pattern joins the first cluster whose
/// representative (its first member) matches every coordinate within
/// `tolerance`. Returns the largest cluster, ties to the earliest.
ModePattern mode_pattern(const std::vector<Vector>& patterns, double tolerance);

}  // namespace hnc
