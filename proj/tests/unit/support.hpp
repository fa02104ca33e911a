#pragma once

#include "hnc/types.hpp"
#include "reference.hpp"

namespace support {

inline hnc::Matrix to_eigen(const ref::Mat& m) {
  hnc::Matrix out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m[0].size()));
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return out;
}

// Columns given as a list of vectors.
inline hnc::Matrix columns(const ref::Mat& cols) { return to_eigen(cols).transpose(); }

inline hnc::Vector to_eigen(const ref::Vec& v) {
  return Eigen::Map<const hnc::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline ref::Vec to_std(const Eigen::Ref<const hnc::Vector>& v) { return {v.data(), v.data() + v.size()}; }

inline hnc::BinaryState to_state(const std::vector<int>& v) {
  return Eigen::Map<const hnc::BinaryState>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<int> state_vec(const hnc::BinaryState& s) { return {s.data(), s.data() + s.size()}; }

inline double max_abs(const ref::Vec& a, const Eigen::Ref<const hnc::RowVector>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[static_cast<Eigen::Index>(i)]));
  return m;
}

}  // namespace support
