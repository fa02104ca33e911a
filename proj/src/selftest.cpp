#include "hnc/selftest.hpp"

#include <functional>
#include <ostream>

#include <fmt/format.h>

#include "hnc/bounds.hpp"
#include "hnc/experiments.hpp"
#include "hnc/hopfield.hpp"
#include "hnc/rng.hpp"
#include "hnc/selection.hpp"

namespace hnc {

namespace {

struct Check {
  const char* name;
  std::function<std::string()> run;  // empty string on success
};

BinaryState random_binary(Rng& rng, Eigen::Index n) {
  BinaryState s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = rng.below(2) ? 1 : -1;
  return s;
}

std::string check_softmax() {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    Vector s(1 + static_cast<Eigen::Index>(rng.below(32)));
    for (auto& v : s) v = rng.uniform(-50.0, 50.0);
    const Vector w = softmax(s);
    if ((w.array() < 0.0).any() || (w.array() > 1.0).any() || std::abs(w.sum() - 1.0) > 1e-12)
      return fmt::format("instance {} is not a probability vector", i);
  }
  return {};
}

std::string check_attention() {
  for (int i = 0; i < 200; ++i) {
    Rng rng(derive_seed(2, static_cast<std::uint64_t>(i)));
    const int dim = 2 + static_cast<int>(rng.below(7));
    const int m = 1 + static_cast<int>(rng.below(32));
    const auto inst = random_bound_instance(rng.next(), dim, m, 1, rng.uniform(0.1, 10.0), 0.1);
    const QueryState q(inst.model, inst.sigma);
    const double diff =
        (attention_view(inst.model, inst.context, q).output - hnc_retrieve(inst.model, inst.context, q).u_new * inst.model.w_v())
            .cwiseAbs()
            .maxCoeff();
    if (diff > 1e-12) return fmt::format("instance {} differs by {:.3g}", i, diff);
  }
  return {};
}

std::string check_bound() {
  for (int i = 0; i < 1000; ++i) {
    Rng rng(derive_seed(3, static_cast<std::uint64_t>(i)));
    const int dim = 2 + static_cast<int>(rng.below(7));
    const int m = 1 + static_cast<int>(rng.below(32));
    const int t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    const auto inst = random_bound_instance(rng.next(), dim, m, t, rng.uniform(0.1, 10.0), rng.uniform());
    verify_bound(inst.model, inst.context, QueryState(inst.model, inst.sigma), inst.u_star, inst.target);
  }
  return {};
}

std::string check_beta() {
  for (int m = 1; m <= 16; ++m) {
    for (int t = 1; t <= m; ++t) {
      double prev = -1.0;
      for (double c = 0.0; c <= 2.0; c += 0.125) {
        const double b = beta_coefficient(c, m, t);
        if (b < prev) return fmt::format("beta decreases in c at M={} t={}", m, t);
        if (t < m && b < beta_coefficient(c, m - 1, t)) return fmt::format("beta decreases in M at M={} t={}", m, t);
        if (t > 1 && b > beta_coefficient(c, m, t - 1)) return fmt::format("beta increases in t at M={} t={}", m, t);
        prev = b;
      }
    }
  }
  return {};
}

std::string check_classic() {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryState m = random_binary(rng, 32);
    const auto net = ClassicHopfield::store(std::vector<BinaryState>{m});
    if (classic_update(net, m).state != m) return "stored pattern is not a fixed point";
    const BinaryState neg = -m;
    if (classic_update(net, neg).state != neg) return "negated pattern is not a fixed point";

    std::vector<BinaryState> pats{random_binary(rng, 32), random_binary(rng, 32), random_binary(rng, 32)};
    const auto multi = ClassicHopfield::store(pats);
    const BinaryState start = random_binary(rng, 32);
    double last = classic_energy(multi, start);
    bool rose = false;
    classic_update(multi, start, UpdateSchedule::sequential, 100, [&](const BinaryState& s) {
      const double e = classic_energy(multi, s);
      if (e > last + 1e-12) rose = true;
      last = e;
    });
    if (rose) return "sequential update increased the energy";
  }
  return {};
}

std::string check_selection() {
  TaskSpec spec = TaskSpec::random(TaskKind::prototype_completion, 4, 3, 0.1, 5);
  const auto task = generate_pool(spec, 30, 0, 6);
  if (random_select(task.pool, 5, 9).chosen != random_select(task.pool, 5, 9).chosen)
    return "random_select is not deterministic";
  HncOracle oracle({spec.x_dim(), spec.y_dim(), 8.0, {}, {}});
  const ScoreFunction score{ScoreKind::cosine_score};
  if (active_select(task.pool, 3, oracle, score, 10, 11).chosen != active_select(task.pool, 3, oracle, score, 10, 11).chosen)
    return "active_select is not deterministic";
  return {};
}

}  // namespace

bool run_selftest(std::ostream& out) {
  const Check checks[] = {
      {"softmax weights form a probability vector", check_softmax},
      {"attention view matches HN-C retrieval (200 instances)", check_attention},
      {"retrieval error within bound (1000 instances)", check_bound},
      {"beta monotone in c, M and t", check_beta},
      {"classic HN fixed points and energy descent", check_classic},
      {"selection determinism", check_selection},
  };
  int failed = 0;
  for (const auto& c : checks) {
    std::string msg;
    try {
      msg = c.run();
    } catch (const std::exception& e) {
      msg = e.what();
    }
    if (msg.empty()) {
      out << "[PASS] " << c.name << '\n';
    } else {
      ++failed;
      out << "[FAIL] " << c.name << ": " << msg << '\n';
    }
  }
  out << fmt::format("selftest: {} passed, {} failed\n", std::size(checks) - static_cast<std::size_t>(failed), failed);
  out << "\ndefault configuration:\n" << ExperimentConfig{}.describe();
  return failed == 0;
}

}  // namespace hnc
