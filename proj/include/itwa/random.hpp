#pragma once

#include <array>
#include <cstdint>

namespace itwa {

/// Philox4x32-10 block function (Salmon et al., SC'11).
///
/// Maps a 128-bit counter and 64-bit key to 128 pseudo-random bits. Being a
/// pure function of (key, counter), it lets every trajectory and step draw
/// its own numbers without any shared generator state.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Sequential stream over the Philox blocks addressed by (seed, stream, substream).
///
/// In the simulation, `stream` is the trajectory index and `substream` the
/// step index (0 is reserved for initial sampling). Successive draws walk the
/// block index in the first counter word.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  /// Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

 private:
  void refill();

  PhiloxKey key_;
  PhiloxCounter counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace itwa
