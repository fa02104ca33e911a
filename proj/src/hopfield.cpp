#include "hnc/hopfield.hpp"

#include <fmt/format.h>

namespace hnc {

namespace {

void check_binary(const BinaryState& s, Eigen::Index n, const char* what) {
  require(s.size() == n, fmt::format("{}: expected length {}, got {}", what, n, s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    require(s[i] == 1 || s[i] == -1, fmt::format("{}: entry {} is {}, not +/-1", what, i, s[i]));
  }
}

}  // namespace

ClassicHopfield ClassicHopfield::store(std::span<const BinaryState> patterns) {
  require(!patterns.empty(), "classic_store: empty pattern list");
  const Eigen::Index n = patterns.front().size();
  require(n > 0, "classic_store: zero-length pattern");

  Matrix w = Matrix::Zero(n, n);
  for (const auto& p : patterns) {
    check_binary(p, n, "classic_store");
    const Vector v = p.cast<double>();
    w.noalias() += v * v.transpose();
  }
  w /= static_cast<double>(n);
  w.diagonal().setZero();
  return ClassicHopfield(std::move(w), {patterns.begin(), patterns.end()});
}

UpdateResult classic_update(const ClassicHopfield& net, const BinaryState& state,
                            UpdateSchedule schedule, int max_sweeps,
                            const UpdateObserver& observer) {
  check_binary(state, net.neuron_count(), "classic_update");
  require(max_sweeps >= 0, "classic_update: max_sweeps must be non-negative");

  const Matrix& w = net.weights();
  const Eigen::Index n = net.neuron_count();
  UpdateResult out{state, false, 0};
  BinaryState& s = out.state;

  while (out.sweeps < max_sweeps) {
    bool changed = false;
    if (schedule == UpdateSchedule::sequential) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double field = w.row(i).dot(s.cast<double>());
        const int next = field > 0.0 ? 1 : (field < 0.0 ? -1 : s[i]);
        if (next != s[i]) {
          s[i] = next;
          changed = true;
        }
        if (observer) observer(s);
      }
    } else {
      const Vector field = w * s.cast<double>();
      BinaryState next = s;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (field[i] > 0.0) next[i] = 1;
        else if (field[i] < 0.0) next[i] = -1;
      }
      changed = next != s;
      s = std::move(next);
      if (observer) observer(s);
    }
    ++out.sweeps;
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double classic_energy(const ClassicHopfield& net, const BinaryState& state) {
  check_binary(state, net.neuron_count(), "classic_energy");
  const Vector s = state.cast<double>();
  return -0.5 * s.dot(net.weights() * s);
}

}  // namespace hnc
