#include "hnc/score.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace hnc {

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::cosine_score: return "cosine-score";
    case ScoreKind::exact_match: return "exact-match";
    case ScoreKind::negative_error: return "negative-error";
  }
  return "?";
}

ScoreKind parse_score_kind(std::string_view text) {
  if (text == "cosine-score") return ScoreKind::cosine_score;
  if (text == "exact-match") return ScoreKind::exact_match;
  if (text == "negative-error") return ScoreKind::negative_error;
  throw InvalidArgument(fmt::format("unknown score function '{}'", text));
}

double ScoreFunction::operator()(const Eigen::Ref<const Vector>& y_hat, const Eigen::Ref<const Vector>& y) const {
  require(y_hat.size() == y.size(),
          fmt::format("score: prediction has length {}, target has {}", y_hat.size(), y.size()));
  require(y_hat.allFinite(), "score: non-finite prediction");
  switch (kind) {
    case ScoreKind::cosine_score: {
      const double nh = y_hat.norm();
      const double ny = y.norm();
      require(nh > 0.0 && ny > 0.0, "score: zero vector under cosine-score");
      const double cos = std::clamp(y_hat.dot(y) / (nh * ny), -1.0, 1.0);
      return 0.5 * (1.0 + cos);
    }
    case ScoreKind::exact_match:
      return (y_hat - y).cwiseAbs().maxCoeff() <= tolerance ? 1.0 : 0.0;
    case ScoreKind::negative_error:
      return -(y_hat - y).norm();
  }
  return 0.0;
}

}  // namespace hnc
