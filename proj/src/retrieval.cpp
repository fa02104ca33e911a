#include "hnc/retrieval.hpp"

#include <cmath>

#include <fmt/format.h>

namespace hnc {

HncModel::HncModel(Matrix xi_q, Matrix xi_k, double gamma, std::optional<Matrix> w_v)
    : xi_q_(std::move(xi_q)), xi_k_(std::move(xi_k)), gamma_(gamma) {
  require(std::isfinite(gamma_) && gamma_ > 0.0, fmt::format("HncModel: gamma must be positive, got {}", gamma_));
  require(xi_q_.rows() > 0 && xi_q_.cols() > 0, "HncModel: xi_q is empty");
  require(xi_q_.rows() == xi_k_.rows() && xi_q_.cols() == xi_k_.cols(),
          fmt::format("HncModel: xi_q is {}x{} but xi_k is {}x{}", xi_q_.rows(), xi_q_.cols(), xi_k_.rows(),
                      xi_k_.cols()));
  w_v_ = w_v ? std::move(*w_v) : Matrix::Identity(xi_q_.cols(), xi_q_.cols());
  require(w_v_.rows() == xi_q_.cols() && w_v_.cols() == xi_q_.cols(), "HncModel: w_v must be d_q x d_q");
  require(all_finite(xi_q_) && all_finite(xi_k_) && all_finite(w_v_), "HncModel: non-finite matrix entry");
}

HncModel HncModel::identity(Eigen::Index d, double gamma) {
  return HncModel(Matrix::Identity(d, d), Matrix::Identity(d, d), gamma);
}

ContextSet::ContextSet(Matrix lambda) : lambda_(std::move(lambda)) {
  require(lambda_.cols() >= 1, "ContextSet: empty context (M = 0)");
  require(all_finite(lambda_), "ContextSet: non-finite context entry");
}

Matrix ContextSet::patterns(const HncModel& model) const {
  require(lambda_.rows() == model.embedding_dim(),
          fmt::format("ContextSet: context vectors have length {}, model expects {}", lambda_.rows(),
                      model.embedding_dim()));
  return model.xi_k().transpose() * lambda_;
}

QueryState::QueryState(const HncModel& model, Vector sigma) : sigma_(std::move(sigma)) {
  require(sigma_.size() == model.embedding_dim(),
          fmt::format("QueryState: sigma has length {}, model expects {}", sigma_.size(), model.embedding_dim()));
  require(all_finite(sigma_), "QueryState: non-finite query entry");
  u_ = sigma_.transpose() * model.xi_q();
}

Vector softmax(const Eigen::Ref<const Vector>& scores) {
  require(scores.size() >= 1, "softmax: empty input");
  const double top = scores.maxCoeff();
  Vector w = (scores.array() - top).exp().matrix();
  return w / w.sum();
}

RetrievalResult hnc_retrieve(const HncModel& model, const ContextSet& ctx, const QueryState& query) {
  const Matrix z = ctx.patterns(model);
  require(query.u().size() == z.rows(), "hnc_retrieve: query pattern and context patterns differ in length");

  RetrievalResult out;
  out.scores = model.gamma() * (query.u() * z).transpose();
  require(out.scores.allFinite(), "hnc_retrieve: non-finite similarity score");
  out.weights = softmax(out.scores);
  out.u_new = out.weights.transpose() * z.transpose();
  return out;
}

AttentionView attention_view(const HncModel& model, const ContextSet& ctx, const QueryState& query) {
  require(ctx.lambda().rows() == model.embedding_dim(), "attention_view: context dimension mismatch");

  AttentionView view;
  view.q = query.sigma().transpose() * model.xi_q();
  view.k_t = model.xi_k().transpose() * ctx.lambda();
  view.v = ctx.lambda().transpose() * model.xi_k() * model.w_v();

  const Vector logits = model.gamma() * (view.q * view.k_t).transpose();
  require(logits.allFinite(), "attention_view: non-finite attention logit");
  view.output = softmax(logits).transpose() * view.v;
  return view;
}

}  // namespace hnc
