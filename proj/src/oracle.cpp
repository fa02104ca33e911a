#include "hnc/oracle.hpp"

#include <fmt/format.h>

namespace hnc {

Embedding Embedding::concatenate(Eigen::Index x_dim, Eigen::Index y_dim) {
  Embedding e;
  e.context = [x_dim, y_dim](const Exemplar& ex) {
    require(ex.x.size() == x_dim && ex.y.size() == y_dim,
            fmt::format("embedding: exemplar {} has shape ({}, {}), expected ({}, {})", ex.id, ex.x.size(),
                        ex.y.size(), x_dim, y_dim));
    Vector v(x_dim + y_dim);
    v << ex.x, ex.y;
    return v;
  };
  e.query = [x_dim, y_dim](const Eigen::Ref<const Vector>& x) {
    require(x.size() == x_dim, fmt::format("embedding: query has length {}, expected {}", x.size(), x_dim));
    Vector v = Vector::Zero(x_dim + y_dim);
    v.head(x_dim) = x;
    return v;
  };
  return e;
}

namespace {

HncModel make_model(const HncOracleConfig& c) {
  require(c.x_dim >= 1 && c.y_dim >= 1, "HncOracle: x_dim and y_dim must be positive");
  const Eigen::Index d = c.x_dim + c.y_dim;
  HncModel model(c.xi_q.value_or(Matrix::Identity(d, d)), c.xi_k.value_or(Matrix::Identity(d, d)), c.gamma);
  require(model.pattern_dim() >= c.y_dim, "HncOracle: pattern dimension smaller than y_dim");
  return model;
}

}  // namespace

HncOracle::HncOracle(HncOracleConfig config, std::optional<Embedding> embed)
    : config_(std::move(config)),
      embed_(embed ? std::move(*embed) : Embedding::concatenate(config_.x_dim, config_.y_dim)),
      model_(make_model(config_)) {
  if (!embed) {
    require(model_.embedding_dim() == config_.x_dim + config_.y_dim,
            fmt::format("HncOracle: model embedding dimension {} does not match x_dim + y_dim = {}",
                        model_.embedding_dim(), config_.x_dim + config_.y_dim));
  }
}

Vector HncOracle::predict(std::span<const Exemplar> context, const Eigen::Ref<const Vector>& x) const {
  if (context.empty()) return Vector::Zero(config_.y_dim);

  const Vector sigma = embed_.query(x);
  require(sigma.size() == model_.embedding_dim(), "HncOracle: query embedding does not match model");
  Matrix lambda(model_.embedding_dim(), static_cast<Eigen::Index>(context.size()));
  for (std::size_t i = 0; i < context.size(); ++i) {
    const Vector col = embed_.context(context[i]);
    require(col.size() == model_.embedding_dim(), "HncOracle: context embedding does not match model");
    lambda.col(static_cast<Eigen::Index>(i)) = col;
  }
  const RetrievalResult r = hnc_retrieve(model_, ContextSet(std::move(lambda)), QueryState(model_, sigma));
  return r.u_new.tail(config_.y_dim).transpose();
}

}  // namespace hnc
