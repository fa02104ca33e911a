#include "hnc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "hnc/remote_oracle.hpp"
#include "hnc/rng.hpp"

namespace hnc {

namespace {

constexpr std::uint64_t kTrialStream = 0x747269616c;
constexpr std::uint64_t kTaskStream = 0x7461736b;
constexpr std::uint64_t kPoolStream = 0x706f6f6c;
constexpr std::uint64_t kSweepStream = 0x7377656570;

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Matrix m(rows, cols);
  // Column-major fill order is part of the instance definition.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  return m;
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

TrialRecord make_record(int trial, std::uint64_t seed, Strategy s, int k, std::vector<double> scores, int failures,
                        long long ms) {
  TrialRecord r;
  r.trial = trial;
  r.trial_seed = seed;
  r.strategy = s;
  r.k = k;
  r.mean_score = mean_of(scores);
  r.per_query_scores = std::move(scores);
  r.score_failures = failures;
  r.runtime_ms = ms;
  return r;
}

double score_or_zero(const ScoreFunction& score, const Vector& pred, const Vector& y, int* failures) {
  try {
    return score(pred, y);
  } catch (const InvalidArgument&) {
    if (failures) ++*failures;
    return 0.0;
  }
}

// Scores each query with its own context: the first k entries of its ranking.
std::vector<double> evaluate_per_query(const Benchmark& bench, const std::vector<std::vector<RankedExemplar>>& rankings,
                                       int k, int* failures) {
  const auto& queries = bench.data.queries;
  std::vector<double> scores;
  scores.reserve(queries.size());
  std::vector<int> ids(static_cast<std::size_t>(k));
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (int i = 0; i < k; ++i) ids[static_cast<std::size_t>(i)] = rankings[q][static_cast<std::size_t>(i)].id;
    const auto context = bench.data.pool.gather(ids);
    scores.push_back(score_or_zero(bench.score, bench.oracle->predict(context, queries[q].x), queries[q].y, failures));
  }
  return scores;
}

std::vector<std::vector<RankedExemplar>> instance_best_rankings(const Benchmark& bench) {
  std::vector<std::vector<RankedExemplar>> out;
  for (const auto& q : bench.data.queries) {
    out.push_back(rank_instance_best(bench.data.pool, q.x, q.y, *bench.oracle, bench.score));
  }
  return out;
}

std::vector<std::vector<RankedExemplar>> metric_rankings(const Benchmark& bench) {
  std::vector<std::vector<RankedExemplar>> out;
  const auto n = static_cast<int>(bench.data.pool.size());
  for (const auto& q : bench.data.queries) {
    const auto sel = metric_select(bench.data.pool, n, q.x, Metric::euclidean);
    std::vector<RankedExemplar> r;
    for (std::size_t i = 0; i < sel.chosen.size(); ++i) r.push_back({sel.chosen[i], sel.diagnostics.chosen_scores[i]});
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<int> prefix(const std::vector<int>& ids, int k) { return {ids.begin(), ids.begin() + k}; }

}  // namespace

std::uint64_t trial_seed(std::uint64_t root, int trial) {
  return derive_seed(derive_seed(root, kTrialStream), static_cast<std::uint64_t>(trial));
}

BoundInstance random_bound_instance(std::uint64_t seed, int dim, int count, int t, double gamma, double dz_scale) {
  require(dim >= 1 && count >= 1 && t >= 1 && t <= count, "random_bound_instance: invalid shape");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix xi_q = gaussian(rng, dim, dim, scale);
  Matrix xi_k = gaussian(rng, dim, dim, scale);
  Matrix lambda = gaussian(rng, dim, count, 1.0);
  const auto target = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(count)));

  // t - 1 further columns become copies of the target.
  std::vector<Eigen::Index> others;
  for (Eigen::Index j = 0; j < count; ++j)
    if (j != target) others.push_back(j);
  const auto pick = fisher_yates_prefix(rng, others.size(), static_cast<std::size_t>(t - 1));
  for (auto p : pick) lambda.col(others[p]) = lambda.col(target);

  Vector sigma = gaussian(rng, dim, 1, 1.0);
  const RowVector dz = gaussian(rng, 1, dim, dz_scale * scale);

  HncModel model(std::move(xi_q), std::move(xi_k), gamma);
  ContextSet ctx(std::move(lambda));
  const RowVector u_star = ctx.patterns(model).col(target).transpose() + dz;
  return {std::move(model), std::move(ctx), std::move(sigma), u_star, target};
}

BoundSweepResult run_bound_sweep(const ExperimentConfig& config) {
  config.validate();
  BoundSweepResult out;
  std::string body;
  long long id = 0;
  const auto n_dup = config.sweep_dup_fraction.size();
  const auto n_inst = static_cast<std::size_t>(config.sweep_instances);

  for (double gamma : config.sweep_gamma) {
    for (std::size_t mi = 0; mi < config.sweep_m.size(); ++mi) {
      const int m = config.sweep_m[mi];
      for (std::size_t di = 0; di < n_dup; ++di) {
        const double frac = config.sweep_dup_fraction[di];
        const int t = std::clamp(static_cast<int>(std::lround(frac * m)), 1, m);
        for (std::size_t i = 0; i < n_inst; ++i) {
          const std::uint64_t stream = (mi * n_dup + di) * n_inst + i;
          const auto inst = random_bound_instance(derive_seed(derive_seed(config.seed, kSweepStream), stream),
                                                  config.sweep_dim, m, t, gamma, config.sweep_dz_scale);
          const BoundReport rep =
              verify_bound(inst.model, inst.context, QueryState(inst.model, inst.sigma), inst.u_star, inst.target);
          const double ratio = rep.upper_bound > 0.0
                                   ? *rep.realized_error / rep.upper_bound
                                   : (*rep.realized_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
          out.max_ratio = std::max(out.max_ratio, ratio);
          body += bound_csv_row(id, rep);
          body += '\n';
          out.instance_ids.push_back(id++);
          out.reports.push_back(rep);
        }
      }
    }
  }
  out.csv = "# hnc bound-sweep csv v1\n" + bound_csv_header() + "\n" + body +
            fmt::format("# summary rows={} violations=0 max_ratio={:.17g}\n", out.reports.size(), out.max_ratio);
  return out;
}

Benchmark make_benchmark(const ExperimentConfig& config) {
  config.validate();
  TaskSpec spec = TaskSpec::random(config.task_kind, config.task_d, config.task_prototypes, config.noise_sigma,
                                   derive_seed(config.seed, kTaskStream));
  GeneratedTask data = generate_pool(spec, config.pool_size, config.query_count, derive_seed(config.seed, kPoolStream));

  std::unique_ptr<CompletionOracle> oracle;
  if (config.oracle_kind == "remote") {
    RemoteOracleConfig rc;
    rc.endpoint = config.oracle_endpoint;
    rc.timeout_ms = config.oracle_timeout_ms;
    rc.max_retries = config.oracle_retries;
    rc.y_dim = spec.y_dim();
    oracle = std::make_unique<RemoteOracle>(std::move(rc));
  } else {
    HncOracleConfig hc;
    hc.x_dim = spec.x_dim();
    hc.y_dim = spec.y_dim();
    hc.gamma = config.oracle_gamma;
    oracle = std::make_unique<HncOracle>(std::move(hc));
  }
  return Benchmark{std::move(spec), std::move(data), std::move(oracle), ScoreFunction{config.score}};
}

std::vector<double> evaluate_context(const Benchmark& bench, const std::vector<int>& context_ids, int* failures) {
  const auto context = bench.data.pool.gather(context_ids);
  std::vector<double> scores;
  scores.reserve(bench.data.queries.size());
  for (const auto& q : bench.data.queries) {
    scores.push_back(score_or_zero(bench.score, bench.oracle->predict(context, q.x), q.y, failures));
  }
  return scores;
}

namespace {

// Shared trial loop for k-study and comparison.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config, const Benchmark& bench) {
  const auto& pool = bench.data.pool;
  const int k_max = config.k_values.back();
  const bool want_ib = std::count(config.strategies.begin(), config.strategies.end(), Strategy::instance_best) > 0;
  const bool want_metric = std::count(config.strategies.begin(), config.strategies.end(), Strategy::metric) > 0;
  // Per-query rankings do not depend on the trial seed.
  const auto ib_rank = want_ib ? instance_best_rankings(bench) : decltype(instance_best_rankings(bench)){};
  const auto metric_rank = want_metric ? metric_rankings(bench) : decltype(metric_rankings(bench)){};

  std::vector<TrialRecord> records;
  for (int trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t seed = trial_seed(config.seed, trial);
    for (Strategy s : config.strategies) {
      switch (s) {
        case Strategy::random:
          for (int k : config.k_values) {
            const auto t0 = Clock::now();
            int failures = 0;
            const auto sel = random_select(pool, k, seed);
            auto scores = evaluate_context(bench, sel.chosen, &failures);
            records.push_back(make_record(trial, seed, s, k, std::move(scores), failures, elapsed_ms(t0)));
          }
          break;
        case Strategy::active: {
          auto t0 = Clock::now();
          const auto sel = active_select(pool, k_max, *bench.oracle, bench.score, config.subsample, seed);
          const long long select_ms = elapsed_ms(t0);
          for (int k : config.k_values) {
            t0 = Clock::now();
            int failures = 0;
            auto scores = evaluate_context(bench, prefix(sel.chosen, k), &failures);
            records.push_back(make_record(trial, seed, s, k, std::move(scores), failures, select_ms + elapsed_ms(t0)));
          }
          break;
        }
        case Strategy::instance_best:
        case Strategy::metric:
          for (int k : config.k_values) {
            const auto t0 = Clock::now();
            int failures = 0;
            auto scores = evaluate_per_query(bench, s == Strategy::metric ? metric_rank : ib_rank, k, &failures);
            records.push_back(make_record(trial, seed, s, k, std::move(scores), failures, elapsed_ms(t0)));
          }
          break;
      }
    }
  }
  return records;
}

}  // namespace

KStudyResult run_k_study(const ExperimentConfig& config) {
  for (Strategy s : config.strategies) {
    require(s == Strategy::random || s == Strategy::active || s == Strategy::instance_best,
            fmt::format("k-study: strategy '{}' not supported (random, active, instance-best)", to_string(s)));
  }
  const Benchmark bench = make_benchmark(config);
  KStudyResult out;
  out.records = run_trials(config, bench);
  out.csv = trial_csv(out.records);
  return out;
}

ComparisonResult run_strategy_comparison(const ExperimentConfig& config) {
  for (Strategy s : config.strategies) {
    require(s == Strategy::random || s == Strategy::metric || s == Strategy::active,
            fmt::format("compare: strategy '{}' not supported (random, metric, active)", to_string(s)));
  }
  ExperimentConfig cfg = config;
  // Win rates are measured against random, so it always runs.
  if (std::find(cfg.strategies.begin(), cfg.strategies.end(), Strategy::random) == cfg.strategies.end()) {
    cfg.strategies.insert(cfg.strategies.begin(), Strategy::random);
  }
  const Benchmark bench = make_benchmark(cfg);

  ComparisonResult out;
  out.records = run_trials(cfg, bench);

  nlohmann::json rows = nlohmann::json::array();
  out.csv = "# hnc compare csv v1\nstrategy,k,trials,mean,sd,win_rate_vs_random\n";
  for (Strategy s : cfg.strategies) {
    for (int k : cfg.k_values) {
      const auto mine = arm_means(out.records, s, k);
      const auto base = arm_means(out.records, Strategy::random, k);
      double wins = 0.0;
      for (std::size_t i = 0; i < mine.size(); ++i) wins += mine[i] > base[i] ? 1.0 : (mine[i] == base[i] ? 0.5 : 0.0);
      const SampleStats st = sample_stats(mine);
      StrategySummary row{s, k, static_cast<int>(mine.size()), st.mean, std::sqrt(st.variance),
                          wins / static_cast<double>(mine.size())};
      out.csv += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", to_string(s), k, row.trials, row.mean, row.sd,
                             row.win_rate_vs_random);
      rows.push_back({{"strategy", std::string(to_string(s))},
                      {"k", k},
                      {"trials", row.trials},
                      {"mean", row.mean},
                      {"sd", row.sd},
                      {"win_rate_vs_random", row.win_rate_vs_random}});
      out.summary.push_back(row);
    }
  }
  out.json = nlohmann::json{{"format", "hnc compare v1"}, {"rows", std::move(rows)}}.dump(2) + "\n";
  return out;
}

SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats st;
  if (xs.empty()) return st;
  st.mean = mean_of(xs);
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - st.mean) * (x - st.mean);
    st.variance = ss / static_cast<double>(xs.size() - 1);
    st.se = std::sqrt(st.variance / static_cast<double>(xs.size()));
  }
  return st;
}

std::vector<double> arm_means(const std::vector<TrialRecord>& records, Strategy strategy, int k) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.strategy == strategy && r.k == k) out.push_back(r.mean_score);
  return out;
}

std::string trial_csv(const std::vector<TrialRecord>& records) {
  std::string csv = "# hnc trial-records csv v1\ntrial,trial_seed,strategy,k,mean_score,queries,score_failures\n";
  for (const auto& r : records) {
    csv += fmt::format("{},{},{},{},{:.17g},{},{}\n", r.trial, r.trial_seed, to_string(r.strategy), r.k, r.mean_score,
                       r.per_query_scores.size(), r.score_failures);
  }
  return csv;
}

}  // namespace hnc
