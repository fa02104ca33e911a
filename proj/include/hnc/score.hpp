#pragma once

#include <string_view>

#include "hnc/types.hpp"

namespace hnc {

enum class ScoreKind { cosine_score, exact_match, negative_error };

std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view text);

/// Task score s(y_hat, y); higher is better.
///  - cosine_score: (1 + cos(y_hat, y)) / 2, in [0, 1]; zero vectors rejected.
///  - exact_match: 1 if every coordinate agrees within `tolerance`, else 0.
///  - negative_error: -||y_hat - y||.
struct ScoreFunction {
  ScoreKind kind = ScoreKind::cosine_score;
  double tolerance = 1e-6;

  double operator()(const Eigen::Ref<const Vector>& y_hat, const Eigen::Ref<const Vector>& y) const;
};

inline double score(const ScoreFunction& fn, const Eigen::Ref<const Vector>& y_hat,
                    const Eigen::Ref<const Vector>& y) {
  return fn(y_hat, y);
}

}  // namespace hnc
