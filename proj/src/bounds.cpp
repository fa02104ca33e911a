#include "hnc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace hnc {

double beta_coefficient(double c, Eigen::Index count, Eigen::Index t) {
  require(t >= 1, fmt::format("beta: t must be >= 1, got {}", t));
  require(count >= t, fmt::format("beta: M ({}) must be >= t ({})", count, t));
  require(c >= 0.0, "beta: c must be non-negative");
  const double rest = static_cast<double>(count - t);
  if (rest == 0.0) return 0.0;
  const double x = c * rest / static_cast<double>(t);
  const double share = std::isinf(x) ? 1.0 : x / (1.0 + x);
  return share + c * rest;
}

SeparationReport separation(const QueryState& query, const ContextSet& ctx, const HncModel& model,
                            Eigen::Index target_index) {
  const Matrix z = ctx.patterns(model);
  const Eigen::Index m = z.cols();
  require(target_index >= 0 && target_index < m,
          fmt::format("separation: target index {} out of range [0, {})", target_index, m));

  SeparationReport rep;
  rep.target_index = target_index;
  rep.count = m;
  const Vector sims = (query.u() * z).transpose();
  rep.delta_all = sims[target_index] - sims.array();
  rep.duplicate.resize(static_cast<std::size_t>(m));

  const auto target = z.col(target_index);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m; ++j) {
    const bool dup = ((z.col(j) - target).cwiseAbs().array() <= kDuplicateTolerance).all();
    rep.duplicate[static_cast<std::size_t>(j)] = dup;
    if (dup) {
      ++rep.duplicate_count;
    } else {
      best = std::min(best, rep.delta_all[j]);
    }
  }
  if (rep.duplicate_count < m) rep.delta_min = best;
  return rep;
}

double realized_error(const RetrievalResult& result, const Eigen::Ref<const RowVector>& u_star) {
  require(result.u_new.size() == u_star.size(),
          fmt::format("realized_error: u_new has length {}, u_star has {}", result.u_new.size(), u_star.size()));
  return (result.u_new - u_star).norm();
}

BoundReport retrieval_bound(const SeparationReport& sep, double gamma, double instance_error, double z_max_norm) {
  require(sep.duplicate_count >= 1, "retrieval_bound: t must be >= 1");
  require(sep.count >= sep.duplicate_count, "retrieval_bound: M < t");
  require(gamma > 0.0, "retrieval_bound: gamma must be positive");
  require(instance_error >= 0.0 && z_max_norm >= 0.0, "retrieval_bound: norms must be non-negative");

  BoundReport r;
  r.gamma = gamma;
  r.delta_min = sep.delta_min;
  r.t = sep.duplicate_count;
  r.count = sep.count;
  r.instance_error = instance_error;
  r.z_max_norm = z_max_norm;
  // M - t = 0 multiplies every c term, so c is irrelevant there.
  r.c = sep.delta_min ? std::exp(-gamma * *sep.delta_min) : 0.0;
  r.beta = beta_coefficient(r.c, r.count, r.t);
  r.upper_bound = r.instance_error + r.beta * r.z_max_norm;
  return r;
}

bool within_bound(double realized, double upper_bound) {
  return realized <= upper_bound + kBoundRelativeTolerance * (1.0 + upper_bound);
}

BoundReport verify_bound(const HncModel& model, const ContextSet& ctx, const QueryState& query,
                         const Eigen::Ref<const RowVector>& u_star, Eigen::Index target_index) {
  require(u_star.size() == model.pattern_dim(),
          fmt::format("verify_bound: u_star has length {}, pattern dimension is {}", u_star.size(),
                      model.pattern_dim()));
  const SeparationReport sep = separation(query, ctx, model, target_index);
  const Matrix z = ctx.patterns(model);
  const double instance_error = (u_star.transpose() - z.col(target_index)).norm();
  const double z_max_norm = z.colwise().norm().maxCoeff();

  BoundReport r = retrieval_bound(sep, model.gamma(), instance_error, z_max_norm);
  r.u_star = u_star.transpose();
  r.realized_error = realized_error(hnc_retrieve(model, ctx, query), u_star);

  if (!within_bound(*r.realized_error, r.upper_bound)) {
    throw BoundViolation(fmt::format("retrieval error {:.17g} exceeds bound {:.17g} (M={}, t={}, gamma={:.17g}, "
                                     "c={:.17g}, instance_error={:.17g}, z_max_norm={:.17g}, target={})",
                                     *r.realized_error, r.upper_bound, r.count, r.t, r.gamma, r.c,
                                     r.instance_error, r.z_max_norm, target_index),
                         r);
  }
  return r;
}

MonotonicityTable bound_monotonicity_check(const BoundReport& base, SweepAxis axis, std::vector<double> values) {
  require(!values.empty(), "bound_monotonicity_check: empty sweep");
  std::sort(values.begin(), values.end());

  MonotonicityTable table;
  table.axis = axis;
  for (double v : values) {
    double c = base.c;
    Eigen::Index m = base.count;
    Eigen::Index t = base.t;
    switch (axis) {
      case SweepAxis::c:
        require(std::isfinite(v) && v >= 0.0, fmt::format("bound_monotonicity_check: invalid c = {}", v));
        c = v;
        break;
      case SweepAxis::count:
      case SweepAxis::t: {
        require(v >= 1.0 && v == std::floor(v), fmt::format("bound_monotonicity_check: invalid count {}", v));
        (axis == SweepAxis::count ? m : t) = static_cast<Eigen::Index>(v);
        break;
      }
    }
    require(m >= t, fmt::format("bound_monotonicity_check: M ({}) < t ({})", m, t));
    const double beta = beta_coefficient(c, m, t);
    table.rows.push_back({v, beta, base.instance_error + beta * base.z_max_norm});
  }

  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double prev = table.rows[i - 1].beta;
    const double cur = table.rows[i].beta;
    if (axis == SweepAxis::t ? cur > prev : cur < prev) table.monotone = false;
  }
  return table;
}

std::string bound_csv_header() {
  return "instance_id,M,t,gamma,delta_min,c,instance_error,beta,z_max_norm,upper_bound,realized_error";
}

std::string bound_csv_row(long long instance_id, const BoundReport& r) {
  const std::string delta = r.delta_min ? fmt::format("{:.17g}", *r.delta_min) : "nan";
  const std::string realized = r.realized_error ? fmt::format("{:.17g}", *r.realized_error) : "";
  return fmt::format("{},{},{},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}", instance_id, r.count, r.t,
                     r.gamma, delta, r.c, r.instance_error, r.beta, r.z_max_norm, r.upper_bound, realized);
}

}  // namespace hnc
