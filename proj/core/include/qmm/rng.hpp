#pragma once

#include <cstdint>

namespace qmm {

/// Deterministic counter-based generator (SplitMix64 core). Identical seed
/// and stream give a bit-identical sequence on every platform, which keeps
/// all experiments reproducible. Every stochastic operation in the library
/// takes one of these explicitly; there is no global RNG state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform on [0,1) with 53 bits of resolution.
  double next_double();

  /// Standard normal via Box-Muller (pair cached).
  double next_gaussian();

  /// +1 or -1 with equal probability.
  int next_sign();

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n);

  /// Child generator for a named substream; children with distinct ids are
  /// statistically independent of the parent and of each other.
  Rng fork(std::uint64_t substream) const;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qmm
