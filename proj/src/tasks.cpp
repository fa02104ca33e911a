#include "hnc/tasks.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "hnc/rng.hpp"

namespace hnc {

using json = nlohmann::json;

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::prototype_completion ? "prototype-completion" : "key-value-association";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "prototype-completion") return TaskKind::prototype_completion;
  if (text == "key-value-association") return TaskKind::key_value_association;
  throw InvalidArgument(fmt::format("unknown task kind '{}'", text));
}

TaskSpec TaskSpec::random(TaskKind kind, int d, int count, double noise_sigma, std::uint64_t seed) {
  require(d >= 1 && count >= 1, "TaskSpec::random: d and prototype count must be positive");
  TaskSpec spec;
  spec.kind = kind;
  spec.d = d;
  spec.noise_sigma = noise_sigma;
  spec.seed = seed;

  Rng rng(derive_seed(seed, 0x70726f74));
  const Eigen::Index len = kind == TaskKind::prototype_completion ? d : 2 * d;
  const Eigen::Index blocks = kind == TaskKind::prototype_completion ? 1 : 2;
  for (int p = 0; p < count; ++p) {
    Vector v(len);
    for (Eigen::Index i = 0; i < len; ++i) v[i] = rng.normal();
    // Each block (key, value) normalised separately.
    for (Eigen::Index b = 0; b < blocks; ++b) v.segment(b * d, d).normalize();
    spec.prototypes.push_back(std::move(v));
  }
  spec.validate();
  return spec;
}

Vector TaskSpec::clean_x(std::size_t latent) const {
  const Vector& p = prototypes.at(latent);
  if (kind == TaskKind::prototype_completion) return p;
  Vector x = Vector::Zero(2 * d);
  x.head(d) = p.head(d);
  return x;
}

Vector TaskSpec::clean_y(std::size_t latent) const {
  const Vector& p = prototypes.at(latent);
  return kind == TaskKind::prototype_completion ? p : Vector(p.tail(d));
}

std::vector<std::string> TaskSpec::validate() const {
  require(d >= 1, "TaskSpec: d must be positive");
  require(!prototypes.empty(), "TaskSpec: need at least one prototype");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "TaskSpec: noise_sigma must be non-negative");
  const Eigen::Index len = kind == TaskKind::prototype_completion ? d : 2 * d;
  for (const auto& p : prototypes) {
    require(p.size() == len, fmt::format("TaskSpec: prototype length {} (expected {})", p.size(), len));
    require(p.allFinite(), "TaskSpec: non-finite prototype");
  }

  std::vector<std::string> warnings;
  for (std::size_t a = 0; a < prototypes.size(); ++a) {
    for (std::size_t b = a + 1; b < prototypes.size(); ++b) {
      const double dist = (prototypes[a] - prototypes[b]).norm();
      require(dist > 0.0, fmt::format("TaskSpec: prototypes {} and {} coincide", a, b));
      if (dist <= 4.0 * noise_sigma) {
        warnings.push_back(
            fmt::format("prototypes {} and {} are {:.4g} apart, within 4 noise_sigma ({:.4g})", a, b, dist,
                        4.0 * noise_sigma));
      }
    }
  }
  return warnings;
}

ExemplarPool::ExemplarPool(std::vector<Exemplar> exemplars) : exemplars_(std::move(exemplars)) {
  require(!exemplars_.empty(), "ExemplarPool: empty pool");
  const Eigen::Index xd = exemplars_.front().x.size();
  const Eigen::Index yd = exemplars_.front().y.size();
  for (std::size_t i = 0; i < exemplars_.size(); ++i) {
    const Exemplar& e = exemplars_[i];
    require(e.x.size() == xd && e.y.size() == yd,
            fmt::format("ExemplarPool: exemplar {} has inconsistent dimensions", e.id));
    require(index_.emplace(e.id, i).second, fmt::format("ExemplarPool: duplicate id {}", e.id));
  }
}

std::size_t ExemplarPool::index_of(int id) const {
  const auto it = index_.find(id);
  require(it != index_.end(), fmt::format("ExemplarPool: unknown id {}", id));
  return it->second;
}

std::vector<Exemplar> ExemplarPool::gather(const std::vector<int>& ids) const {
  std::vector<Exemplar> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(by_id(id));
  return out;
}

GeneratedTask generate_pool(const TaskSpec& spec, int pool_size, int query_count, std::uint64_t seed) {
  spec.validate();
  require(pool_size >= 2, "generate_pool: pool size must be >= 2");
  require(query_count >= 0, "generate_pool: negative query count");

  Rng rng(seed);
  const std::uint64_t p = spec.prototypes.size();
  auto draw = [&](Vector& x, Vector& y) {
    const auto latent = static_cast<std::size_t>(rng.below(p));
    x = spec.clean_x(latent);
    const Eigen::Index noisy = spec.kind == TaskKind::prototype_completion ? x.size() : spec.d;
    for (Eigen::Index i = 0; i < noisy; ++i) x[i] += spec.noise_sigma * rng.normal();
    y = spec.clean_y(latent);
    return static_cast<int>(latent);
  };

  std::vector<Exemplar> exemplars(static_cast<std::size_t>(pool_size));
  for (int i = 0; i < pool_size; ++i) {
    Exemplar& e = exemplars[static_cast<std::size_t>(i)];
    e.id = i;
    e.latent_id = draw(e.x, e.y);
  }
  std::vector<QuerySample> queries(static_cast<std::size_t>(query_count));
  for (auto& q : queries) q.latent_id = draw(q.x, q.y);
  return {ExemplarPool(std::move(exemplars)), std::move(queries)};
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const json& j, const char* field) {
  require(j.is_array(), fmt::format("pool line: '{}' must be an array", field));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), fmt::format("pool line: '{}' has a non-numeric entry", field));
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

void write_pool_jsonl(std::ostream& out, const ExemplarPool& pool) {
  for (const auto& e : pool.exemplars()) {
    const json line = {{"id", e.id}, {"x", to_std(e.x)}, {"y", to_std(e.y)}, {"latent_id", e.latent_id}};
    out << line.dump() << '\n';
  }
}

ExemplarPool read_pool_jsonl(std::istream& in) {
  std::vector<Exemplar> exemplars;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& err) {
      throw InvalidArgument(fmt::format("pool line {}: {}", line_no, err.what()));
    }
    require(j.contains("id") && j["id"].is_number_integer(), fmt::format("pool line {}: missing integer id", line_no));
    Exemplar e;
    e.id = j["id"].get<int>();
    require(j.contains("x") && j.contains("y"), fmt::format("pool line {}: missing x or y", line_no));
    e.x = to_vector(j["x"], "x");
    e.y = to_vector(j["y"], "y");
    e.latent_id = j.value("latent_id", -1);
    exemplars.push_back(std::move(e));
  }
  return ExemplarPool(std::move(exemplars));
}

}  // namespace hnc
