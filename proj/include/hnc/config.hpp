#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hnc/score.hpp"
#include "hnc/selection.hpp"
#include "hnc/tasks.hpp"

namespace hnc {

/// Flat experiment configuration. File format: one `key = value` per line,
/// `#` starts a comment, lists are comma separated. Keys:
///
///   task.kind          prototype-completion | key-value-association
///   task.d             pattern dimension
///   task.prototypes    number of latent prototypes P
///   task.noise_sigma   std-dev of the isotropic noise on x
///   pool.size          training pool size
///   queries.size       number of test queries
///   oracle.kind        builtin | remote
///   oracle.endpoint    http://host:port/path (remote only)
///   oracle.gamma       inverse temperature of the built-in oracle
///   oracle.timeout_ms  remote request timeout
///   oracle.retries     remote retries after a transport error
///   score              cosine-score | exact-match | negative-error
///   strategies         subset of random, metric, active, instance-best
///   k_values           ascending list of context sizes
///   trials             number of seeded trials
///   seed               root seed
///   subsample          probe budget for active values, or `all`
///   output             output CSV path (stdout when empty)
///   sweep.gamma        bound-sweep gamma grid
///   sweep.m            bound-sweep context-count grid
///   sweep.dup_fraction bound-sweep t/M grid
///   sweep.instances    random instances per grid point
///   sweep.dim          d_m = d_q of bound-sweep instances
///   sweep.dz_scale     scale of the instance error dz
struct ExperimentConfig {
  TaskKind task_kind = TaskKind::prototype_completion;
  int task_d = 8;
  int task_prototypes = 5;
  double noise_sigma = 0.1;
  int pool_size = 200;
  int query_count = 100;

  std::string oracle_kind = "builtin";
  std::string oracle_endpoint;
  double oracle_gamma = 8.0;
  int oracle_timeout_ms = 5000;
  int oracle_retries = 2;

  ScoreKind score = ScoreKind::cosine_score;
  std::vector<Strategy> strategies{Strategy::random, Strategy::active, Strategy::instance_best};
  std::vector<int> k_values{1, 2, 4, 8, 16};
  int trials = 100;
  std::uint64_t seed = 2024;
  Subsample subsample = kDefaultSubsample;
  std::string output;

  std::vector<double> sweep_gamma{0.5, 2.0, 8.0};
  std::vector<int> sweep_m{2, 8, 32};
  std::vector<double> sweep_dup_fraction{0.0, 0.5, 1.0};
  int sweep_instances = 100;
  int sweep_dim = 4;
  double sweep_dz_scale = 0.1;

  /// Sets one key from its textual value; throws InvalidArgument on an
  /// unknown key or malformed value.
  void set(std::string_view key, std::string_view value);

  /// Throws InvalidArgument when the configuration is inconsistent.
  void validate() const;

  /// `key = value` lines for every key, in documentation order.
  std::string describe() const;
};

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

}  // namespace hnc
