#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hnc/rng.hpp"
#include "hnc/selection.hpp"
#include "support.hpp"

using namespace hnc;

namespace {

Exemplar ex(int id, Vector x, Vector y) { return {id, std::move(x), std::move(y), -1}; }

// Returns the same vector for every call; records nothing.
class ConstantOracle final : public CompletionOracle {
 public:
  explicit ConstantOracle(Vector out) : out_(std::move(out)) {}
  Vector predict(std::span<const Exemplar>, const Eigen::Ref<const Vector>&) const override { return out_; }
  std::string_view name() const override { return "constant"; }
  bool supports_concurrency() const override { return true; }

 private:
  Vector out_;
};

// Predicts the context exemplar's own y when its id is `good`, else -y.
class OneGoodOracle final : public CompletionOracle {
 public:
  explicit OneGoodOracle(int good) : good_(good) {}
  Vector predict(std::span<const Exemplar> ctx, const Eigen::Ref<const Vector>&) const override {
    return ctx[0].id == good_ ? Vector(ctx[0].y) : Vector(-ctx[0].y);
  }
  std::string_view name() const override { return "one-good"; }
  bool supports_concurrency() const override { return true; }

 private:
  int good_;
};

class ThrowingOracle final : public CompletionOracle {
 public:
  Vector predict(std::span<const Exemplar>, const Eigen::Ref<const Vector>&) const override {
    throw OracleFailure("boom", "req-7");
  }
  std::string_view name() const override { return "throwing"; }
  bool supports_concurrency() const override { return true; }
};

// Built-in oracle semantics evaluated with plain loops.
ref::Vec ref_predict(const std::vector<const Exemplar*>& ctx, const Vector& x, double gamma) {
  const std::size_t dx = static_cast<std::size_t>(x.size()), dy = static_cast<std::size_t>(ctx[0]->y.size());
  ref::Mat identity(dx + dy, ref::Vec(dx + dy, 0.0));
  for (std::size_t i = 0; i < dx + dy; ++i) identity[i][i] = 1.0;
  ref::Mat lambda;
  for (const auto* e : ctx) {
    ref::Vec col = support::to_std(e->x);
    for (double v : support::to_std(e->y)) col.push_back(v);
    lambda.push_back(col);
  }
  ref::Vec sigma = support::to_std(x);
  sigma.resize(dx + dy, 0.0);
  const auto full = ref::softmax_retrieve(sigma, identity, identity, lambda, gamma);
  return ref::Vec(full.begin() + static_cast<std::ptrdiff_t>(dx), full.end());
}

double ref_cosine(const ref::Vec& a, const ref::Vec& b) {
  return 0.5 * (1.0 + ref::dot(a, b) / std::sqrt(ref::dot(a, a) * ref::dot(b, b)));
}

GeneratedTask seed13_task(int n = 20, int queries = 0) {
  return generate_pool(TaskSpec::random(TaskKind::prototype_completion, 4, 3, 0.1, 13), n, queries, 13);
}

const ScoreFunction kCosine{ScoreKind::cosine_score};

}  // namespace

TEST_CASE("Strategy names round-trip") {
  for (auto s : {Strategy::random, Strategy::metric, Strategy::active, Strategy::instance_best})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK(to_string(Strategy::instance_best) == "instance-best");
  CHECK_THROWS_AS(parse_strategy("bm25"), InvalidArgument);
}

TEST_CASE("random_select: whole pool, determinism and range") {
  const auto task = seed13_task();
  auto all = random_select(task.pool, 20, 1).chosen;
  std::sort(all.begin(), all.end());
  std::vector<int> ids(20);
  std::iota(ids.begin(), ids.end(), 0);
  CHECK(all == ids);

  const auto a = random_select(task.pool, 5, 99);
  const auto b = random_select(task.pool, 5, 99);
  CHECK(a.chosen == b.chosen);
  CHECK(a.strategy == Strategy::random);
  CHECK(a.diagnostics.seed == 99u);
  CHECK_THROWS_AS(random_select(task.pool, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(random_select(task.pool, 21, 1), InvalidArgument);
}

TEST_CASE("random_select: pool of 10, k = 3, seed 42 matches the reference sampler") {
  const auto task = seed13_task(10);
  auto expected = ref::fisher_yates_prefix(42, 10, 3);
  std::sort(expected.begin(), expected.end());
  const auto got = random_select(task.pool, 3, 42).chosen;
  REQUIRE(got.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == static_cast<int>(expected[i]));
}

TEST_CASE("random_select: every exemplar is equally likely") {
  const auto task = seed13_task(10);
  std::vector<int> hits(10, 0);
  const int trials = 20000;
  for (int s = 0; s < trials; ++s)
    for (int id : random_select(task.pool, 3, derive_seed(5, static_cast<std::uint64_t>(s))).chosen) ++hits[static_cast<std::size_t>(id)];
  // Expected 6000 each; sd about 65.
  for (int h : hits) CHECK(std::abs(h - 6000) <= 400);
}

TEST_CASE("metric_select: exact match, ties and errors") {
  std::vector<Exemplar> pts;
  for (int i = 0; i < 6; ++i) pts.push_back(ex(10 + i, Vector::Unit(6, i), Vector::Ones(1)));
  const ExemplarPool pool(pts);
  CHECK(metric_select(pool, 1, Vector::Unit(6, 3), Metric::euclidean).chosen == std::vector<int>{13});
  CHECK(metric_select(pool, 1, Vector::Unit(6, 3), Metric::cosine).chosen == std::vector<int>{13});
  // Origin is equidistant from every unit vector.
  CHECK(metric_select(pool, 2, Vector::Zero(6), Metric::euclidean).chosen == std::vector<int>{10, 11});
  CHECK_THROWS_AS(metric_select(pool, 2, Vector::Zero(6), Metric::cosine), InvalidArgument);
  CHECK_THROWS_AS(metric_select(pool, 2, Vector::Zero(5), Metric::euclidean), InvalidArgument);
  CHECK_THROWS_AS(metric_select(pool, 7, Vector::Zero(6), Metric::euclidean), InvalidArgument);
}

TEST_CASE("metric_select: seed-5 2-D points match a brute-force sort") {
  std::mt19937_64 g(5);
  std::vector<Exemplar> pts;
  ref::Mat coords;
  for (int i = 0; i < 8; ++i) {
    coords.push_back(ref::random_vec(g, 2));
    pts.push_back(ex(i, support::to_eigen(coords.back()), Vector::Ones(1)));
  }
  const ref::Vec q = ref::random_vec(g, 2);
  std::vector<int> order(8);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ref::dist(coords[static_cast<std::size_t>(a)], q) < ref::dist(coords[static_cast<std::size_t>(b)], q); });
  const auto got = metric_select(ExemplarPool(pts), 3, support::to_eigen(q), Metric::euclidean);
  CHECK(got.chosen == std::vector<int>(order.begin(), order.begin() + 3));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(got.diagnostics.chosen_scores[i] == doctest::Approx(ref::dist(coords[static_cast<std::size_t>(order[i])], q)));
}

TEST_CASE("value_estimate: constant perfect score gives 1") {
  const Vector y = (Vector(2) << 0.3, 0.4).finished();
  std::vector<Exemplar> pts;
  for (int i = 0; i < 6; ++i) pts.push_back(ex(i, Vector::Constant(3, i), y));
  const ExemplarPool pool(pts);
  const ConstantOracle oracle(y);
  for (const auto& e : pool.exemplars()) {
    const auto v = value_estimate(e, pool, oracle, ScoreFunction{ScoreKind::exact_match}, std::nullopt, 1);
    CHECK(v.value == 1.0);
    CHECK(v.sample_count == 5);
  }
}

TEST_CASE("value_estimate: pool of two is a single term") {
  const auto task = seed13_task(2);
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  const Exemplar& e1 = task.pool[0];
  const Exemplar& e2 = task.pool[1];
  const auto v = value_estimate(e1, task.pool, oracle, kCosine, std::nullopt, 3);
  CHECK(v.sample_count == 1);
  CHECK(v.value == kCosine(oracle.predict(std::span<const Exemplar>(&e1, 1), e2.x), e2.y));
  CHECK_THROWS_AS(value_estimate(e1, ExemplarPool({e1}), oracle, kCosine, std::nullopt, 3), InvalidArgument);
  CHECK_THROWS_AS(value_estimate(e1, task.pool, oracle, kCosine, 2, 3), InvalidArgument);
}

TEST_CASE("value_estimate: seed-13 pool of 20 over all members matches a brute-force mean") {
  const auto task = seed13_task();
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  for (const auto& e : task.pool.exemplars()) {
    double total = 0.0;
    for (const auto& other : task.pool.exemplars()) {
      if (other.id == e.id) continue;
      total += ref_cosine(ref_predict({&e}, other.x, 8.0), support::to_std(other.y));
    }
    const auto v = value_estimate(e, task.pool, oracle, kCosine, std::nullopt, 0);
    CHECK(v.sample_count == 19);
    CHECK(std::abs(v.value - total / 19.0) <= 1e-12);
    CHECK(v.value == doctest::Approx(std::accumulate(v.scores.begin(), v.scores.end(), 0.0) / 19.0).epsilon(1e-14));
  }
}

TEST_CASE("value_estimate: unbiased under uniform sub-sampling (200 seeds)") {
  const auto task = seed13_task(60);
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  for (int idx : {0, 17, 42}) {
    const Exemplar& e = task.pool[static_cast<std::size_t>(idx)];
    const double full = value_estimate(e, task.pool, oracle, kCosine, std::nullopt, 0).value;
    std::vector<double> est;
    for (std::uint64_t s = 0; s < 200; ++s) est.push_back(value_estimate(e, task.pool, oracle, kCosine, 8, s).value);
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / 200.0;
    double ss = 0.0;
    for (double x : est) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / 199.0 / 200.0);
    CHECK(std::abs(mean - full) <= 3.0 * se);
  }
}

TEST_CASE("value_estimate: score failures count 0, oracle failures propagate") {
  const auto task = seed13_task(5);
  const ConstantOracle zero(Vector::Zero(4));
  const auto v = value_estimate(task.pool[0], task.pool, zero, kCosine, std::nullopt, 0);
  CHECK(v.value == 0.0);
  CHECK(v.score_failures == 4);

  try {
    value_estimate(task.pool[2], task.pool, ThrowingOracle{}, kCosine, std::nullopt, 0);
    FAIL("expected OracleFailure");
  } catch (const OracleFailure& e) {
    CHECK(e.request_id() == "req-7");
    CHECK(std::string(e.what()).find("exemplar 2") != std::string::npos);
    CHECK(std::string(e.what()).find("probe 0") != std::string::npos);
  }
}

TEST_CASE("active_select: pool of two picks the higher single-term value") {
  const auto task = seed13_task(2);
  const OneGoodOracle oracle(1);
  const auto r = active_select(task.pool, 1, oracle, kCosine, std::nullopt, 0);
  CHECK(r.chosen == std::vector<int>{1});
  REQUIRE(r.diagnostics.values.size() == 2);
  CHECK(r.diagnostics.values[1].value > r.diagnostics.values[0].value);
}

TEST_CASE("active_select: a dominant exemplar ranks first") {
  const auto task = seed13_task();
  const OneGoodOracle oracle(7);
  CHECK(active_select(task.pool, 3, oracle, ScoreFunction{ScoreKind::exact_match}, std::nullopt, 0).chosen.front() == 7);
}

TEST_CASE("active_select: seed-13 pool, k = 5, subsample = 10 matches a scripted re-run") {
  const auto task = seed13_task();
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  const std::uint64_t seed = 13;
  const auto probes = ref::fisher_yates_prefix(derive_seed(seed, kProbeStream), 20, 11);

  std::vector<std::pair<double, int>> values;
  for (std::size_t i = 0; i < 20; ++i) {
    const Exemplar& e = task.pool[i];
    std::vector<double> terms;
    for (std::size_t p : probes) {
      if (p == i || terms.size() == 10) continue;
      terms.push_back(ref_cosine(ref_predict({&e}, task.pool[p].x, 8.0), support::to_std(task.pool[p].y)));
    }
    values.emplace_back(std::accumulate(terms.begin(), terms.end(), 0.0) / 10.0, e.id);
  }
  std::stable_sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.first - b.first) > 1e-12) return a.first > b.first;
    return a.second < b.second;
  });

  const auto r = active_select(task.pool, 5, oracle, kCosine, 10, seed);
  REQUIRE(r.chosen.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r.chosen[i] == values[i].second);
  REQUIRE(r.diagnostics.values.size() == 20);
  for (const auto& v : r.diagnostics.values) {
    CHECK(v.sample_count == 10);
    CHECK(v.scores.size() == 10);
  }
}

TEST_CASE("active_select: equal values fall back to ascending ids") {
  std::vector<Exemplar> pts;
  for (int i = 9; i >= 0; --i) pts.push_back(ex(i, Vector::Constant(2, i), Vector::Ones(2)));
  const ConstantOracle oracle(Vector::Unit(2, 0));
  CHECK(active_select(ExemplarPool(pts), 4, oracle, kCosine, std::nullopt, 0).chosen == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("active_select: invariant to pool order with every member probed") {
  const auto task = seed13_task(30);
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  const auto base = active_select(task.pool, 6, oracle, kCosine, std::nullopt, 0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto shuffled = task.pool.exemplars();
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(s));
    const auto r = active_select(ExemplarPool(shuffled), 6, oracle, kCosine, std::nullopt, 0);
    CHECK(r.chosen == base.chosen);
  }
}

TEST_CASE("selection strategies are deterministic") {
  const auto task = seed13_task(30, 3);
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  for (std::uint64_t seed : {0ull, 1ull, 77ull}) {
    CHECK(active_select(task.pool, 4, oracle, kCosine, 7, seed).chosen ==
          active_select(task.pool, 4, oracle, kCosine, 7, seed).chosen);
    CHECK(random_select(task.pool, 4, seed).chosen == random_select(task.pool, 4, seed).chosen);
  }
  const auto& q = task.queries[0];
  CHECK(instance_best_select(task.pool, q.x, q.y, 3, oracle, kCosine).chosen ==
        instance_best_select(task.pool, q.x, q.y, 3, oracle, kCosine).chosen);
  CHECK(metric_select(task.pool, 3, q.x, Metric::cosine).chosen == metric_select(task.pool, 3, q.x, Metric::cosine).chosen);
}

TEST_CASE("instance_best_select: examples") {
  const auto task = seed13_task(20, 4);
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  std::mt19937_64 g(4);
  std::vector<Exemplar> distinct;
  for (int i = 0; i < 6; ++i)
    distinct.push_back(ex(i, support::to_eigen(ref::random_vec(g, 4)), support::to_eigen(ref::random_vec(g, 4))));
  const ExemplarPool small(distinct);
  const auto self = instance_best_select(small, distinct[3].x, distinct[3].y, 1, oracle,
                                         ScoreFunction{ScoreKind::negative_error});
  CHECK(self.chosen.front() == 3);
  CHECK(self.diagnostics.chosen_scores.front() == 0.0);

  const Exemplar& e = task.pool[9];

  const ConstantOracle flat(Vector::Ones(4));
  CHECK(instance_best_select(task.pool, e.x, e.y, 3, flat, kCosine).chosen == std::vector<int>{0, 1, 2});

  // Brute-force ranking for a fixed query.
  const auto& q = task.queries[1];
  std::vector<std::pair<double, int>> ranked;
  for (const auto& cand : task.pool.exemplars())
    ranked.emplace_back(ref_cosine(ref_predict({&cand}, q.x, 8.0), support::to_std(q.y)), cand.id);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.first - b.first) > 1e-12) return a.first > b.first;
    return a.second < b.second;
  });
  const auto r = instance_best_select(task.pool, q.x, q.y, 3, oracle, kCosine);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.chosen[i] == ranked[i].second);
    CHECK(std::abs(r.diagnostics.chosen_scores[i] - ranked[i].first) <= 1e-12);
  }
}

TEST_CASE("instance_best_select: k = 1 is never beaten by another strategy's k = 1 choice") {
  const auto task = seed13_task(40, 30);
  const HncOracle oracle({4, 4, 8.0, {}, {}});
  const auto active = active_select(task.pool, 1, oracle, kCosine, 10, 3).chosen.front();
  for (std::size_t qi = 0; qi < task.queries.size(); ++qi) {
    const auto& q = task.queries[qi];
    auto score_of = [&](int id) {
      const Exemplar& e = task.pool.by_id(id);
      return kCosine(oracle.predict(std::span<const Exemplar>(&e, 1), q.x), q.y);
    };
    const double best = score_of(instance_best_select(task.pool, q.x, q.y, 1, oracle, kCosine).chosen.front());
    CHECK(best >= score_of(active));
    CHECK(best >= score_of(random_select(task.pool, 1, qi).chosen.front()));
    CHECK(best >= score_of(metric_select(task.pool, 1, q.x, Metric::euclidean).chosen.front()));
    CHECK(best >= score_of(metric_select(task.pool, 1, q.x, Metric::cosine).chosen.front()));
  }
}

TEST_CASE("mode_pattern: examples") {
  const Vector a = Vector::Ones(3), b = Vector::Zero(3);
  const auto all = mode_pattern({a, a, a, a}, 0.0);
  CHECK(all.count == 4);
  CHECK(all.representative == a);

  const auto aab = mode_pattern({a, a, b}, 1e-12);
  CHECK(aab.count == 2);
  CHECK(aab.representative == a);
  CHECK(aab.cluster_sizes == std::vector<int>{2, 1});

  const auto tie = mode_pattern({b, a, a, b}, 0.0);
  CHECK(tie.representative == b);
  CHECK(tie.first_index == 0);

  CHECK_THROWS_AS(mode_pattern({}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(mode_pattern({a, Vector::Ones(2)}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(mode_pattern({Vector(0)}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(mode_pattern({a}, -1.0), InvalidArgument);
}

TEST_CASE("mode_pattern: noisy copies of three prototypes match exact clustering") {
  std::mt19937_64 g(50);
  const ref::Mat protos{ref::random_vec(g, 4), ref::random_vec(g, 4), ref::random_vec(g, 4)};
  std::vector<ref::Vec> pts;
  std::vector<Vector> vecs;
  std::normal_distribution<double> noise(0.0, 1e-4);
  for (int i = 0; i < 50; ++i) {
    ref::Vec p = protos[g() % 3];
    for (auto& v : p) v += noise(g);
    pts.push_back(p);
    vecs.push_back(support::to_eigen(p));
  }
  const double tol = 1e-2;
  auto expected = ref::cluster_sizes(pts, tol);
  const auto got = mode_pattern(vecs, tol);
  auto sizes = got.cluster_sizes;
  std::sort(sizes.rbegin(), sizes.rend());
  CHECK(sizes == expected);
  CHECK(expected.size() == 3);
  CHECK(got.count == expected.front());
}
