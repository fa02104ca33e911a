#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "hnc/retrieval.hpp"
#include "hnc/tasks.hpp"

namespace hnc {

/// The oracle could not produce a prediction (transport error, malformed
/// response, non-success status).
class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, std::string request_id = {})
      : std::runtime_error(what), request_id_(std::move(request_id)) {}
  const std::string& request_id() const { return request_id_; }

 private:
  std::string request_id_;
};

/// Predictor F(e_1..e_K, x) -> y_hat. Implementations read only `x` and `y`
/// of the context exemplars.
class CompletionOracle {
 public:
  virtual ~CompletionOracle() = default;

  virtual Vector predict(std::span<const Exemplar> context, const Eigen::Ref<const Vector>& x) const = 0;
  virtual std::string_view name() const = 0;
  virtual bool supports_concurrency() const = 0;
};

/// Maps exemplars and queries into the d_m dimensional embedding space.
struct Embedding {
  std::function<Vector(const Exemplar&)> context;
  std::function<Vector(const Eigen::Ref<const Vector>&)> query;

  /// Context (x || y), query (x || 0).
  static Embedding concatenate(Eigen::Index x_dim, Eigen::Index y_dim);
};

struct HncOracleConfig {
  Eigen::Index x_dim = 0;
  Eigen::Index y_dim = 0;
  double gamma = 8.0;
  // Identity of size x_dim + y_dim when unset.
  std::optional<Matrix> xi_q;
  std::optional<Matrix> xi_k;
};

/// Built-in oracle: stacks the embedded exemplars as the columns of Lambda,
/// retrieves with the embedded query and reads y_hat from the trailing
/// y_dim coordinates of u_new. An empty context predicts the zero vector.
class HncOracle final : public CompletionOracle {
 public:
  explicit HncOracle(HncOracleConfig config, std::optional<Embedding> embed = std::nullopt);

  Vector predict(std::span<const Exemplar> context, const Eigen::Ref<const Vector>& x) const override;
  std::string_view name() const override { return "hnc-builtin"; }
  bool supports_concurrency() const override { return true; }

  const HncModel& model() const { return model_; }
  const HncOracleConfig& config() const { return config_; }

 private:
  HncOracleConfig config_;
  Embedding embed_;
  HncModel model_;
};

}  // namespace hnc
