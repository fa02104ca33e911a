#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hnc {

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;
using BinaryState = Eigen::VectorXi;

// Precondition failures (bad shapes, out-of-range indices, empty inputs).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A property that must hold by construction was observed to fail.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

}  // namespace hnc
