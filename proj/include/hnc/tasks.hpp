#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hnc/types.hpp"

namespace hnc {

enum class TaskKind { prototype_completion, key_value_association };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view text);

/// Generative law of a synthetic in-context task. A latent prototype is drawn
/// uniformly; x carries isotropic Gaussian noise, y is the clean completion.
///
///  - prototype_completion: prototypes have length d; x = p + noise, y = p.
///  - key_value_association: prototypes are (key || value) of length 2d;
///    x = (key + noise || 0_d), y = value.
struct TaskSpec {
  TaskKind kind = TaskKind::prototype_completion;
  int d = 8;
  std::vector<Vector> prototypes;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;

  /// Draws `count` unit-norm Gaussian prototypes from `seed`.
  static TaskSpec random(TaskKind kind, int d, int count, double noise_sigma, std::uint64_t seed);

  Eigen::Index x_dim() const { return kind == TaskKind::prototype_completion ? d : 2 * d; }
  Eigen::Index y_dim() const { return d; }
  Vector clean_x(std::size_t latent) const;
  Vector clean_y(std::size_t latent) const;

  /// Throws on structural problems; returns human-readable warnings (e.g.
  /// prototypes closer than 4 noise_sigma).
  std::vector<std::string> validate() const;
};

struct Exemplar {
  int id = 0;
  Vector x;
  Vector y;
  // Evaluation-only; oracles must not read it.
  int latent_id = -1;
};

class ExemplarPool {
 public:
  explicit ExemplarPool(std::vector<Exemplar> exemplars);

  std::size_t size() const { return exemplars_.size(); }
  const std::vector<Exemplar>& exemplars() const { return exemplars_; }
  const Exemplar& operator[](std::size_t i) const { return exemplars_[i]; }
  const Exemplar& by_id(int id) const { return exemplars_[index_of(id)]; }
  std::size_t index_of(int id) const;
  Eigen::Index x_dim() const { return exemplars_.front().x.size(); }
  Eigen::Index y_dim() const { return exemplars_.front().y.size(); }

  std::vector<Exemplar> gather(const std::vector<int>& ids) const;

 private:
  std::vector<Exemplar> exemplars_;
  std::unordered_map<int, std::size_t> index_;
};

struct QuerySample {
  Vector x;
  Vector y;
  int latent_id = -1;
};

struct GeneratedTask {
  ExemplarPool pool;
  std::vector<QuerySample> queries;
};

/// Pool ids are 0..pool_size-1. Pool and queries are i.i.d. from the same law.
GeneratedTask generate_pool(const TaskSpec& spec, int pool_size, int query_count, std::uint64_t seed);

/// One exemplar per line: {"id":..,"x":[..],"y":[..],"latent_id":..}.
void write_pool_jsonl(std::ostream& out, const ExemplarPool& pool);
ExemplarPool read_pool_jsonl(std::istream& in);

}  // namespace hnc
