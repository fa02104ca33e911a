#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hnc/types.hpp"

namespace hnc {

enum class UpdateSchedule { sequential, synchronous };

// Binary Hopfield network with Hebbian weights W = (1/N) sum_m m m^T and a
// zeroed diagonal.
class ClassicHopfield {
 public:
  static ClassicHopfield store(std::span<const BinaryState> patterns);

  Eigen::Index neuron_count() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }
  const std::vector<BinaryState>& stored_patterns() const { return patterns_; }

 private:
  ClassicHopfield(Matrix weights, std::vector<BinaryState> patterns)
      : weights_(std::move(weights)), patterns_(std::move(patterns)) {}

  Matrix weights_;
  std::vector<BinaryState> patterns_;
};

struct UpdateResult {
  BinaryState state;
  bool converged = false;
  int sweeps = 0;
};

// Called with the full state after every neuron update (sequential) or every
// sweep (synchronous).
using UpdateObserver = std::function<void(const BinaryState&)>;

/// Iterates the sign update until a sweep leaves the state unchanged or
/// `max_sweeps` is reached. A zero local field keeps the neuron's current
/// value. Sequential sweeps visit neurons 0..N-1 in order and never increase
/// the energy; synchronous sweeps carry no such guarantee and may 2-cycle.
UpdateResult classic_update(const ClassicHopfield& net, const BinaryState& state,
                            UpdateSchedule schedule = UpdateSchedule::sequential,
                            int max_sweeps = 100, const UpdateObserver& observer = {});

/// E(s) = -1/2 s^T W s.
double classic_energy(const ClassicHopfield& net, const BinaryState& state);

}  // namespace hnc
