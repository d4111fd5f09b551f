#include "itwa/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "itwa/errors.hpp"
#include "itwa/random.hpp"

namespace itwa {
namespace {
constexpr double kSqrt3 = std::numbers::sqrt3;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

SpinAngles normalized(SpinAngles a) {
  a.theta = std::clamp(a.theta, 0.0, std::numbers::pi);
  a.phi = std::fmod(a.phi, kTwoPi);
  if (a.phi < 0.0) a.phi += kTwoPi;
  if (a.phi >= kTwoPi) a.phi = 0.0;
  return a;
}

Matrix2c phase_point_kernel(SpinAngles a) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  const std::complex<double> up = kSqrt3 * s * std::polar(1.0, -a.phi);
  Matrix2c k;
  k[0][0] = 0.5 * (1.0 + kSqrt3 * c);
  k[0][1] = 0.5 * up;
  k[1][0] = 0.5 * std::conj(up);
  k[1][1] = 0.5 * (1.0 - kSqrt3 * c);
  return k;
}

double pauli_weyl(PauliAxis axis, SpinAngles a) {
  switch (axis) {
    case PauliAxis::x:
      return kSqrt3 * std::sin(a.theta) * std::cos(a.phi);
    case PauliAxis::y:
      return kSqrt3 * std::sin(a.theta) * std::sin(a.phi);
    case PauliAxis::z:
      return kSqrt3 * std::cos(a.theta);
  }
  return 0.0;
}

SpinEnsembleState::SpinEnsembleState(std::size_t n_spins, std::size_t n_traj)
    : n_spins_(n_spins), n_traj_(n_traj), angles_(n_spins * n_traj) {}

SpinAngles sample_uniform_spin(CounterRng& rng) {
  const double u = rng.uniform(-1.0, 1.0);
  return {std::acos(u), rng.uniform(0.0, kTwoPi)};
}

void sample_fully_mixed(std::span<SpinAngles> spins, CounterRng& rng) {
  for (auto& s : spins) s = sample_uniform_spin(rng);
}

SpinEnsembleState sample_fully_mixed(std::size_t n_spins, std::size_t n_traj, std::uint64_t seed) {
  if (n_spins == 0) throw ValidationError("sample_fully_mixed: n_spins must be >= 1");
  SpinEnsembleState state(n_spins, n_traj);
  for (std::size_t t = 0; t < n_traj; ++t) {
    CounterRng rng(seed, t, 0);
    sample_fully_mixed(state.trajectory(t), rng);
  }
  return state;
}

}  // namespace itwa
