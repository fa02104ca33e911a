#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hnc/retrieval.hpp"

namespace hnc {

// Per-coordinate tolerance under which two context patterns count as equal.
inline constexpr double kDuplicateTolerance = 1e-12;
// Relative slack allowed when comparing a realized error against its bound.
inline constexpr double kBoundRelativeTolerance = 1e-9;

struct SeparationReport {
  Eigen::Index target_index = 0;
  Eigen::Index count = 0;  // M
  /// delta_all[j] = u z_target - u z_j; entries for duplicates of the target
  /// are present but excluded from delta_min.
  Vector delta_all;
  std::vector<bool> duplicate;
  /// Unset when every context pattern equals the target (t = M).
  std::optional<double> delta_min;
  Eigen::Index duplicate_count = 0;  // t
};

struct BoundReport {
  double gamma = 0.0;
  std::optional<double> delta_min;
  double instance_error = 0.0;
  double c = 0.0;
  Eigen::Index t = 0;
  Eigen::Index count = 0;  // M
  double beta = 0.0;
  double z_max_norm = 0.0;
  double upper_bound = 0.0;
  std::optional<double> realized_error;
  Vector u_star;

  double contextual_error() const { return beta * z_max_norm; }
};

/// beta = 1 - (1 + c (M - t) / t)^-1 + c (M - t), evaluated as
/// x / (1 + x) + c (M - t) with x = c (M - t) / t.
double beta_coefficient(double c, Eigen::Index count, Eigen::Index t);

SeparationReport separation(const QueryState& query, const ContextSet& ctx, const HncModel& model,
                            Eigen::Index target_index);

/// ||u_new - u_star||.
double realized_error(const RetrievalResult& result, const Eigen::Ref<const RowVector>& u_star);

BoundReport retrieval_bound(const SeparationReport& sep, double gamma, double instance_error, double z_max_norm);

/// Thrown by verify_bound; carries the full offending instance.
class BoundViolation : public InvariantViolation {
 public:
  BoundViolation(const std::string& what, BoundReport report) : InvariantViolation(what), report_(std::move(report)) {}
  const BoundReport& report() const { return report_; }

 private:
  BoundReport report_;
};

/// Retrieves, decomposes u_star = (z_target + dz)^T, evaluates the bound with
/// z_max taken as the context pattern of largest Euclidean norm, and checks
/// the realized error against it. Throws BoundViolation on a breach.
BoundReport verify_bound(const HncModel& model, const ContextSet& ctx, const QueryState& query,
                         const Eigen::Ref<const RowVector>& u_star, Eigen::Index target_index);

/// True when `realized` is within the bound's relative tolerance.
bool within_bound(double realized, double upper_bound);

enum class SweepAxis { c, count, t };

struct MonotonicityRow {
  double parameter = 0.0;
  double beta = 0.0;
  double upper_bound = 0.0;
};

struct MonotonicityTable {
  SweepAxis axis = SweepAxis::c;
  std::vector<MonotonicityRow> rows;  // sorted by parameter
  /// beta non-decreasing along c and M, non-increasing along t.
  bool monotone = true;
};

/// Re-evaluates beta and the bound of `base` with one of (c, M, t) replaced by
/// each value in `values` and the other two held fixed.
MonotonicityTable bound_monotonicity_check(const BoundReport& base, SweepAxis axis, std::vector<double> values);

std::string bound_csv_header();
std::string bound_csv_row(long long instance_id, const BoundReport& report);

}  // namespace hnc
