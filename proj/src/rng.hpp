#pragma once

#include <complex>
#include <cstdint>

namespace starsec {

// Self-contained counter-free generator (splitmix64 core). The standard
// library distributions are implementation-defined, which would break
// bit-identical channel dumps across toolchains, so sampling is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in (0, 1].
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (one spare cached).
  double normal();

  /// Circularly-symmetric complex normal, unit variance (Re/Im each 1/2).
  std::complex<double> cnormal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Mixes a master seed with a stream tag into an independent sub-seed.
/// Used so each channel link gets its own stream: adding links never
/// perturbs the draws of existing ones.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag);

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag_a, std::uint64_t tag_b);

}  // namespace starsec
