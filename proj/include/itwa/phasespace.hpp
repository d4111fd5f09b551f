#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace itwa {

/// Spin direction on the sphere: theta in [0, pi], phi in [0, 2 pi).
struct SpinAngles {
  double theta = 0.0;
  double phi = 0.0;

  bool operator==(const SpinAngles&) const = default;
};

/// Returns angles with theta clamped to [0, pi] and phi wrapped into [0, 2 pi).
SpinAngles normalized(SpinAngles a);

enum class PauliAxis { x, y, z };

using Matrix2c = std::array<std::array<std::complex<double>, 2>, 2>;

/// Single-spin phase-point operator (Stratonovich-Weyl kernel) at the given angles.
Matrix2c phase_point_kernel(SpinAngles a);

/// Weyl symbol Tr{sigma^axis * kernel}: sqrt(3) times the unit vector component.
double pauli_weyl(PauliAxis axis, SpinAngles a);

/// Trajectory ensemble: n_traj copies of an n_spins phase-space point, stored
/// trajectory-major (all spins of trajectory 0, then trajectory 1, ...).
class SpinEnsembleState {
 public:
  SpinEnsembleState() = default;
  SpinEnsembleState(std::size_t n_spins, std::size_t n_traj);

  std::size_t n_spins() const { return n_spins_; }
  std::size_t n_traj() const { return n_traj_; }

  std::span<SpinAngles> trajectory(std::size_t t) {
    return {angles_.data() + t * n_spins_, n_spins_};
  }
  std::span<const SpinAngles> trajectory(std::size_t t) const {
    return {angles_.data() + t * n_spins_, n_spins_};
  }
  std::span<const SpinAngles> all() const { return angles_; }

  bool operator==(const SpinEnsembleState&) const = default;

 private:
  std::size_t n_spins_ = 0;
  std::size_t n_traj_ = 0;
  std::vector<SpinAngles> angles_;
};

class CounterRng;

/// Draws one spin uniformly on the sphere (u = cos theta uniform on [-1, 1]).
SpinAngles sample_uniform_spin(CounterRng& rng);

/// Fills `spins` with independent draws from the infinite-temperature Wigner
/// distribution.
void sample_fully_mixed(std::span<SpinAngles> spins, CounterRng& rng);

/// Ensemble of n_traj fully mixed samples; trajectory t uses stream (seed, t, 0).
SpinEnsembleState sample_fully_mixed(std::size_t n_spins, std::size_t n_traj, std::uint64_t seed);

}  // namespace itwa
