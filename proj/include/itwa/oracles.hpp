#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "itwa/graphs.hpp"
#include "itwa/models.hpp"

namespace itwa {

inline constexpr std::size_t kMaxEnumerationSpins = 26;
inline constexpr std::size_t kMaxEdSpins = 12;

enum class OracleMethod { enumeration, annealing };
std::string to_string(OracleMethod m);

struct GroundStateReport {
  double energy = 0.0;
  SpinAssignment assignment;   // one representative ground configuration
  std::uint64_t degeneracy = 0;  // enumeration only; 0 for annealing
  OracleMethod method = OracleMethod::enumeration;
};

/// Configuration index <-> assignment: spin i is bit i, set bit means -1.
SpinAssignment assignment_from_bits(std::uint64_t bits, std::size_t n);
std::uint64_t bits_from_assignment(const SpinAssignment& s);

/// Exact level structure of H = J sum_edges s_i s_j: energy -> number of configurations.
std::map<double, std::uint64_t> enumerate_spectrum(const RegularGraph& g, double J);

/// Exact ground state by visiting all 2^N configurations (N <= 26).
GroundStateReport enumerate_ground_state(const RegularGraph& g, double J);

/// Exact thermal energy sum E exp(-tau E) / sum exp(-tau E) (N <= 26).
double enumerate_thermal_energy(const RegularGraph& g, double J, double tau);
double thermal_energy(const std::map<double, std::uint64_t>& spectrum, double tau);
/// log Z(tau) - log Z(0) for a level spectrum.
double log_partition_ratio(const std::map<double, std::uint64_t>& spectrum, double tau);

struct AnnealingOptions {
  std::size_t restarts = 64;
  std::size_t sweeps = 1000;
  double t_start = 3.0;  // in units of J
  double t_end = 0.05;
};

/// Best energy found by geometric-cooling single-spin-flip Metropolis runs.
/// Restart r uses stream (seed, r, 0); an upper bound on the ground energy.
GroundStateReport sa_estimate_ground_state(const RegularGraph& g, double J, const AnnealingOptions& opts,
                                           std::uint64_t seed);

struct ThermalTfim {
  double energy = 0.0;
  double m_sq = 0.0;
};

/// Full spectrum of the unshifted TFIM H = -h sum sx - J sum_bonds sz sz
/// (N <= 12), diagonalized separately in the two sectors of the global spin
/// flip. Thermal averages are then cheap for any tau.
class TfimSpectrum {
 public:
  explicit TfimSpectrum(const TFIMModel& m);

  ThermalTfim thermal(double tau) const;
  double ground_energy() const { return e_min_; }

 private:
  std::vector<double> energies_;
  std::vector<double> m_sq_;  // <n| M^2 |n>
  double e_min_ = 0.0;
};

ThermalTfim ed_thermal_tfim(const TFIMModel& m, double tau);

}  // namespace itwa
