#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "itwa/models.hpp"
#include "itwa/phasespace.hpp"

namespace itwa {

/// Ensemble at imaginary time `tau` together with its trajectory log-weights.
///
/// raw accumulated log-weight L_k = -int_0^tau H dtau' equals
/// log_weights[k] + log_weight_offset. Invalidated trajectories carry
/// valid[k] == 0 and log_weights[k] == -inf.
struct WeightedSnapshot {
  double tau = 0.0;
  std::uint64_t steps = 0;  // Euler steps taken since tau = 0
  SpinEnsembleState states;
  std::vector<double> log_weights;
  double log_weight_offset = 0.0;
  std::vector<std::uint8_t> valid;

  std::size_t n_traj() const { return log_weights.size(); }
  std::size_t n_valid() const;
};

struct Schedule {
  double d_tau = 1e-3;
  std::vector<double> snapshot_taus;
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  /// Worker threads; 0 selects the default (ITWA_THREADS or hardware concurrency).
  std::size_t threads = 0;
};

/// Throws ValidationError unless d_tau > 0, taus are strictly increasing,
/// non-negative, and integer multiples of d_tau, and n_traj >= 1.
void validate(const Schedule& schedule);

/// Number of Euler steps from 0 to tau.
std::uint64_t step_count(double tau, double d_tau);

std::size_t default_worker_count();

struct EvolveReport {
  std::size_t n_traj = 0;
  std::size_t n_invalid = 0;
  double invalid_fraction() const {
    return n_traj ? static_cast<double>(n_invalid) / static_cast<double>(n_traj) : 0.0;
  }
};

/// tau = 0 snapshot: fully mixed samples from stream (seed, trajectory, 0), zero log-weights.
WeightedSnapshot initial_snapshot(const Model& model, std::size_t n_traj, std::uint64_t seed);

/// Advances every valid trajectory by one Euler-Maruyama step. The noise of
/// trajectory t comes from stream (seed, t, snapshot.steps + 1), so repeated
/// calls reproduce evolve() exactly. Log-weights are not re-stabilized.
WeightedSnapshot step(const WeightedSnapshot& snapshot, const Model& model, double d_tau,
                      std::uint64_t seed);

using SnapshotSink = std::function<void(const WeightedSnapshot&)>;

/// Samples the initial ensemble and integrates it through the schedule,
/// calling `sink` at every snapshot tau with log-weights shifted so that the
/// largest valid one is zero. Results do not depend on the worker count.
EvolveReport evolve(const Model& model, const Schedule& schedule, const SnapshotSink& sink);

/// Convenience overload collecting all snapshots (memory grows with n_traj * n_spins * snapshots).
std::vector<WeightedSnapshot> evolve(const Model& model, const Schedule& schedule,
                                     EvolveReport* report = nullptr);

}  // namespace itwa
