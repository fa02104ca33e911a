#pragma once

#include <optional>

#include "hnc/types.hpp"

namespace hnc {

enum class Similarity { dot_product };
enum class Separation { softmax };

/// Hopfield Network with Context. Query vectors sigma (length d_m) and context
/// vectors lambda_i (columns of a d_m x M matrix) are mapped into a d_q
/// dimensional associative space by xi_q and xi_k.
class HncModel {
 public:
  /// `w_v` defaults to the d_q x d_q identity.
  HncModel(Matrix xi_q, Matrix xi_k, double gamma, std::optional<Matrix> w_v = std::nullopt);

  /// xi_q = xi_k = I_d, w_v = I_d.
  static HncModel identity(Eigen::Index d, double gamma);

  Eigen::Index embedding_dim() const { return xi_q_.rows(); }
  Eigen::Index pattern_dim() const { return xi_q_.cols(); }
  const Matrix& xi_q() const { return xi_q_; }
  const Matrix& xi_k() const { return xi_k_; }
  const Matrix& w_v() const { return w_v_; }
  double gamma() const { return gamma_; }
  Similarity similarity() const { return Similarity::dot_product; }
  Separation separation() const { return Separation::softmax; }

 private:
  Matrix xi_q_;
  Matrix xi_k_;
  Matrix w_v_;
  double gamma_;
};

class ContextSet {
 public:
  explicit ContextSet(Matrix lambda);

  const Matrix& lambda() const { return lambda_; }
  Eigen::Index count() const { return lambda_.cols(); }

  /// Z = xi_k^T Lambda; column j is the context pattern z_j.
  Matrix patterns(const HncModel& model) const;

 private:
  Matrix lambda_;
};

class QueryState {
 public:
  QueryState(const HncModel& model, Vector sigma);

  const Vector& sigma() const { return sigma_; }
  /// u = sigma xi_q as a row vector.
  const RowVector& u() const { return u_; }

 private:
  Vector sigma_;
  RowVector u_;
};

struct RetrievalResult {
  RowVector u_new;
  Vector weights;
  Vector scores;
};

struct AttentionView {
  RowVector q;
  Matrix k_t;
  Matrix v;
  RowVector output;
};

/// Softmax with the maximum subtracted before exponentiation.
Vector softmax(const Eigen::Ref<const Vector>& scores);

/// u_new = softmax(gamma * u Z) Z^T with Z = xi_k^T Lambda.
RetrievalResult hnc_retrieve(const HncModel& model, const ContextSet& ctx, const QueryState& query);

/// Q = sigma xi_q, K^T = xi_k^T Lambda, V = Lambda^T xi_k W_v and
/// output = softmax(gamma Q K^T) V, evaluated without going through
/// hnc_retrieve.
AttentionView attention_view(const HncModel& model, const ContextSet& ctx, const QueryState& query);

}  // namespace hnc
