#include "hnc/selection.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "hnc/rng.hpp"

namespace hnc {

namespace {

void check_k(const ExemplarPool& pool, int k) {
  require(k >= 1 && static_cast<std::size_t>(k) <= pool.size(),
          fmt::format("selection: k = {} outside [1, {}]", k, pool.size()));
}

// Orders (id, score) pairs best-first with ascending id on ties.
template <typename Better>
void sort_ranked(std::vector<RankedExemplar>& r, Better better) {
  std::sort(r.begin(), r.end(), [&](const RankedExemplar& a, const RankedExemplar& b) {
    if (a.score != b.score) return better(a.score, b.score);
    return a.id < b.id;
  });
}

double score_or_zero(const ScoreFunction& score, const Vector& pred, const Vector& y, int& failures) {
  try {
    return score(pred, y);
  } catch (const InvalidArgument&) {
    ++failures;
    return 0.0;
  }
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::metric: return "metric";
    case Strategy::active: return "active";
    case Strategy::instance_best: return "instance-best";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "random") return Strategy::random;
  if (text == "metric") return Strategy::metric;
  if (text == "active") return Strategy::active;
  if (text == "instance-best") return Strategy::instance_best;
  throw InvalidArgument(fmt::format("unknown strategy '{}'", text));
}

SelectionResult random_select(const ExemplarPool& pool, int k, std::uint64_t seed) {
  check_k(pool, k);
  Rng rng(seed);
  auto picked = fisher_yates_prefix(rng, pool.size(), static_cast<std::size_t>(k));
  std::sort(picked.begin(), picked.end());

  SelectionResult out;
  out.strategy = Strategy::random;
  out.diagnostics.seed = seed;
  for (auto i : picked) out.chosen.push_back(pool[i].id);
  return out;
}

SelectionResult metric_select(const ExemplarPool& pool, int k, const Eigen::Ref<const Vector>& query_x,
                              Metric metric) {
  check_k(pool, k);
  require(query_x.size() == pool.x_dim(),
          fmt::format("metric_select: query has length {}, pool inputs have {}", query_x.size(), pool.x_dim()));
  const double qn = query_x.norm();
  if (metric == Metric::cosine) require(qn > 0.0, "metric_select: zero query vector under cosine metric");

  std::vector<RankedExemplar> ranked;
  ranked.reserve(pool.size());
  for (const auto& e : pool.exemplars()) {
    double s = 0.0;
    if (metric == Metric::cosine) {
      const double en = e.x.norm();
      require(en > 0.0, fmt::format("metric_select: exemplar {} has a zero input under cosine metric", e.id));
      s = query_x.dot(e.x) / (qn * en);
    } else {
      s = (query_x - e.x).norm();
    }
    ranked.push_back({e.id, s});
  }
  if (metric == Metric::cosine) {
    sort_ranked(ranked, std::greater<>{});
  } else {
    sort_ranked(ranked, std::less<>{});
  }

  SelectionResult out;
  out.strategy = Strategy::metric;
  for (int i = 0; i < k; ++i) {
    out.chosen.push_back(ranked[static_cast<std::size_t>(i)].id);
    out.diagnostics.chosen_scores.push_back(ranked[static_cast<std::size_t>(i)].score);
  }
  return out;
}

std::vector<std::size_t> probe_positions(std::size_t pool_size, Subsample subsample, std::uint64_t seed) {
  if (!subsample) {
    std::vector<std::size_t> all(pool_size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  require(*subsample >= 1 && static_cast<std::size_t>(*subsample) + 1 <= pool_size,
          fmt::format("value estimate: subsample {} outside [1, {}]", *subsample, pool_size - 1));
  Rng rng(derive_seed(seed, kProbeStream));
  return fisher_yates_prefix(rng, pool_size, static_cast<std::size_t>(*subsample) + 1);
}

namespace {

ValueEstimate estimate_with_probes(const Exemplar& e, const ExemplarPool& pool, const CompletionOracle& oracle,
                                   const ScoreFunction& score, const std::vector<std::size_t>& probes,
                                   std::size_t budget) {
  ValueEstimate v;
  v.exemplar_id = e.id;
  v.scores.reserve(budget);
  const std::span<const Exemplar> context(&e, 1);
  for (std::size_t pos : probes) {
    if (v.scores.size() == budget) break;
    const Exemplar& probe = pool[pos];
    if (probe.id == e.id) continue;
    Vector pred;
    try {
      pred = oracle.predict(context, probe.x);
    } catch (const OracleFailure& err) {
      throw OracleFailure(fmt::format("value estimate for exemplar {} on probe {}: {}", e.id, probe.id, err.what()),
                          err.request_id());
    }
    v.scores.push_back(score_or_zero(score, pred, probe.y, v.score_failures));
  }
  require(!v.scores.empty(), fmt::format("value estimate: no probes available for exemplar {}", e.id));
  v.sample_count = static_cast<int>(v.scores.size());
  // Summed in sorted order so equal score multisets give bit-equal values.
  std::vector<double> sorted = v.scores;
  std::sort(sorted.begin(), sorted.end());
  v.value = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(v.sample_count);
  return v;
}

std::size_t probe_budget(const ExemplarPool& pool, Subsample subsample) {
  return subsample ? static_cast<std::size_t>(*subsample) : pool.size() - 1;
}

}  // namespace

ValueEstimate value_estimate(const Exemplar& e, const ExemplarPool& pool, const CompletionOracle& oracle,
                             const ScoreFunction& score, Subsample subsample, std::uint64_t seed) {
  require(pool.size() >= 2, "value estimate: pool must hold at least 2 exemplars");
  const auto probes = probe_positions(pool.size(), subsample, seed);
  return estimate_with_probes(e, pool, oracle, score, probes, probe_budget(pool, subsample));
}

SelectionResult active_select(const ExemplarPool& pool, int k, const CompletionOracle& oracle,
                              const ScoreFunction& score, Subsample subsample, std::uint64_t seed) {
  check_k(pool, k);
  require(pool.size() >= 2, "active_select: pool must hold at least 2 exemplars");
  const auto probes = probe_positions(pool.size(), subsample, seed);
  const std::size_t budget = probe_budget(pool, subsample);

  SelectionResult out;
  out.strategy = Strategy::active;
  out.diagnostics.seed = seed;
  std::vector<RankedExemplar> ranked;
  ranked.reserve(pool.size());
  for (const auto& e : pool.exemplars()) {
    ValueEstimate v = estimate_with_probes(e, pool, oracle, score, probes, budget);
    ranked.push_back({e.id, v.value});
    out.diagnostics.score_failures += v.score_failures;
    out.diagnostics.values.push_back(std::move(v));
  }
  sort_ranked(ranked, std::greater<>{});
  for (int i = 0; i < k; ++i) {
    out.chosen.push_back(ranked[static_cast<std::size_t>(i)].id);
    out.diagnostics.chosen_scores.push_back(ranked[static_cast<std::size_t>(i)].score);
  }
  return out;
}

std::vector<RankedExemplar> rank_instance_best(const ExemplarPool& pool, const Eigen::Ref<const Vector>& x,
                                               const Eigen::Ref<const Vector>& y, const CompletionOracle& oracle,
                                               const ScoreFunction& score, int* failures) {
  std::vector<RankedExemplar> ranked;
  ranked.reserve(pool.size());
  int bad = 0;
  const Vector target = y;
  for (const auto& e : pool.exemplars()) {
    Vector pred;
    try {
      pred = oracle.predict(std::span<const Exemplar>(&e, 1), x);
    } catch (const OracleFailure& err) {
      throw OracleFailure(fmt::format("instance-best scoring of exemplar {}: {}", e.id, err.what()),
                          err.request_id());
    }
    ranked.push_back({e.id, score_or_zero(score, pred, target, bad)});
  }
  sort_ranked(ranked, std::greater<>{});
  if (failures) *failures += bad;
  return ranked;
}

SelectionResult instance_best_select(const ExemplarPool& pool, const Eigen::Ref<const Vector>& x,
                                     const Eigen::Ref<const Vector>& y, int k, const CompletionOracle& oracle,
                                     const ScoreFunction& score) {
  check_k(pool, k);
  SelectionResult out;
  out.strategy = Strategy::instance_best;
  const auto ranked = rank_instance_best(pool, x, y, oracle, score, &out.diagnostics.score_failures);
  for (int i = 0; i < k; ++i) {
    out.chosen.push_back(ranked[static_cast<std::size_t>(i)].id);
    out.diagnostics.chosen_scores.push_back(ranked[static_cast<std::size_t>(i)].score);
  }
  return out;
}

ModePattern mode_pattern(const std::vector<Vector>& patterns, double tolerance) {
  require(!patterns.empty(), "mode_pattern: empty pattern list");
  require(tolerance >= 0.0, "mode_pattern: negative tolerance");
  require(patterns.front().size() > 0, "mode_pattern: empty pattern vector");

  std::vector<std::size_t> reps;  // index of each cluster's first member
  ModePattern out;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    require(patterns[i].size() == patterns.front().size(), "mode_pattern: patterns differ in length");
    bool placed = false;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if ((patterns[i] - patterns[reps[c]]).cwiseAbs().maxCoeff() <= tolerance) {
        ++out.cluster_sizes[c];
        placed = true;
        break;
      }
    }
    if (!placed) {
      reps.push_back(i);
      out.cluster_sizes.push_back(1);
    }
  }
  const auto best = std::max_element(out.cluster_sizes.begin(), out.cluster_sizes.end());  // first max
  const auto c = static_cast<std::size_t>(best - out.cluster_sizes.begin());
  out.first_index = reps[c];
  out.representative = patterns[reps[c]];
  out.count = *best;
  return out;
}

}  // namespace hnc
