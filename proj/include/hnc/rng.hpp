#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hnc {

/// Mixes a root seed with a stream index into an independent 64-bit seed
/// (SplitMix64 finalizer applied twice).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

/// Deterministic random source. Every draw is defined here on top of the raw
/// mt19937_64 stream so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). Rejection sampling: draws r until
  /// r >= (2^64 - n) mod n, then returns r mod n.
  std::uint64_t below(std::uint64_t n);

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes two draws per call.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// First `count` entries of a Fisher-Yates shuffle of 0..n-1: for i in
/// [0, count) swap position i with i + below(n - i). The returned order is the
/// draw order.
std::vector<std::size_t> fisher_yates_prefix(Rng& rng, std::size_t n, std::size_t count);

}  // namespace hnc
