#include "itwa/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "itwa/errors.hpp"
#include "itwa/random.hpp"

namespace itwa {
namespace {

void guard_enumeration(const RegularGraph& g) {
  if (g.n() > kMaxEnumerationSpins) {
    throw SizeGuardError("enumeration limited to N <= " + std::to_string(kMaxEnumerationSpins) +
                         " spins (got " + std::to_string(g.n()) + "); use the annealing estimate instead");
  }
}

/// Visits all 2^N configurations in Gray-code order, calling fn(bits, bond_sum)
/// where bond_sum = sum_edges s_i s_j.
template <class Fn>
void for_each_configuration(const RegularGraph& g, Fn&& fn) {
  const std::size_t n = g.n();
  std::vector<int> s(n, 1);
  long long bond_sum = static_cast<long long>(g.edge_count());
  std::uint64_t bits = 0;
  fn(bits, bond_sum);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto i = static_cast<std::size_t>(std::countr_zero(k));
    long long local = 0;
    for (auto j : g.neighbors(i)) local += s[j];
    bond_sum -= 2LL * s[i] * local;
    s[i] = -s[i];
    bits ^= std::uint64_t{1} << i;
    fn(bits, bond_sum);
  }
}

}  // namespace

std::string to_string(OracleMethod m) {
  return m == OracleMethod::enumeration ? "enumeration" : "annealing";
}

SpinAssignment assignment_from_bits(std::uint64_t bits, std::size_t n) {
  SpinAssignment s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = ((bits >> i) & 1u) ? -1 : 1;
  return s;
}

std::uint64_t bits_from_assignment(const SpinAssignment& s) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < 0) bits |= std::uint64_t{1} << i;
  return bits;
}

std::map<double, std::uint64_t> enumerate_spectrum(const RegularGraph& g, double J) {
  guard_enumeration(g);
  const long long m = static_cast<long long>(g.edge_count());
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * m + 1), 0);
  for_each_configuration(g, [&](std::uint64_t, long long bond_sum) { ++counts[bond_sum + m]; });
  std::map<double, std::uint64_t> spectrum;
  for (long long b = -m; b <= m; ++b)
    if (counts[b + m]) spectrum[J * static_cast<double>(b)] = counts[b + m];
  return spectrum;
}

GroundStateReport enumerate_ground_state(const RegularGraph& g, double J) {
  guard_enumeration(g);
  long long best = std::numeric_limits<long long>::max();
  std::uint64_t best_bits = 0, degeneracy = 0;
  for_each_configuration(g, [&](std::uint64_t bits, long long bond_sum) {
    if (bond_sum < best) {
      best = bond_sum;
      best_bits = bits;
      degeneracy = 1;
    } else if (bond_sum == best) {
      ++degeneracy;
      best_bits = std::min(best_bits, bits);
    }
  });
  GroundStateReport r;
  r.energy = J * static_cast<double>(best);
  r.assignment = assignment_from_bits(best_bits, g.n());
  r.degeneracy = degeneracy;
  r.method = OracleMethod::enumeration;
  return r;
}

double thermal_energy(const std::map<double, std::uint64_t>& spectrum, double tau) {
  if (spectrum.empty()) throw ValidationError("thermal_energy: empty spectrum");
  const double e0 = spectrum.begin()->first;
  double num = 0.0, den = 0.0;
  for (const auto& [e, count] : spectrum) {
    const double w = static_cast<double>(count) * std::exp(-tau * (e - e0));
    num += w * e;
    den += w;
  }
  return num / den;
}

double log_partition_ratio(const std::map<double, std::uint64_t>& spectrum, double tau) {
  const double e0 = spectrum.begin()->first;
  double z = 0.0, z0 = 0.0;
  for (const auto& [e, count] : spectrum) {
    z += static_cast<double>(count) * std::exp(-tau * (e - e0));
    z0 += static_cast<double>(count);
  }
  return -tau * e0 + std::log(z / z0);
}

double enumerate_thermal_energy(const RegularGraph& g, double J, double tau) {
  if (tau < 0.0) throw ValidationError("enumerate_thermal_energy: tau must be >= 0");
  return thermal_energy(enumerate_spectrum(g, J), tau);
}

GroundStateReport sa_estimate_ground_state(const RegularGraph& g, double J, const AnnealingOptions& opts,
                                           std::uint64_t seed) {
  if (opts.restarts < 1) throw ValidationError("annealing: restarts must be >= 1");
  if (opts.sweeps < 1) throw ValidationError("annealing: sweeps must be >= 1");
  const std::size_t n = g.n();
  long long best = std::numeric_limits<long long>::max();
  std::vector<int> best_s;
  std::vector<int> s(n);
  std::vector<long long> local(n);
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    CounterRng rng(seed, r, 0);
    for (auto& x : s) x = rng.uniform() < 0.5 ? 1 : -1;
    long long bond_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      local[i] = 0;
      for (auto j : g.neighbors(i)) local[i] += s[j];
    }
    for (const auto& [i, j] : g.edges()) bond_sum += s[i] * s[j];
    if (bond_sum < best) {
      best = bond_sum;
      best_s = s;
    }
    const double ratio =
        opts.sweeps > 1 ? std::pow(opts.t_end / opts.t_start, 1.0 / static_cast<double>(opts.sweeps - 1)) : 1.0;
    double temp = opts.t_start;
    for (std::size_t sweep = 0; sweep < opts.sweeps; ++sweep, temp *= ratio) {
      for (std::size_t i = 0; i < n; ++i) {
        // Flipping s_i changes sum_edges s s by -2 s_i local_i (energy in units of J).
        const long long delta = -2LL * s[i] * local[i];
        if (delta > 0 && rng.uniform() >= std::exp(-static_cast<double>(delta) / temp)) continue;
        s[i] = -s[i];
        for (auto j : g.neighbors(i)) local[j] += 2LL * s[i];
        bond_sum += delta;
        if (bond_sum < best) {
          best = bond_sum;
          best_s = s;
        }
      }
    }
  }
  GroundStateReport rep;
  rep.energy = J * static_cast<double>(best);
  rep.assignment = best_s;
  rep.degeneracy = 0;
  rep.method = OracleMethod::annealing;
  return rep;
}

TfimSpectrum::TfimSpectrum(const TFIMModel& m) {
  const std::size_t n = m.n_spins();
  if (n > kMaxEdSpins) {
    throw SizeGuardError("dense ED limited to N <= " + std::to_string(kMaxEdSpins) + " spins (got " +
                         std::to_string(n) + ")");
  }
  const std::uint64_t full = std::uint64_t{1} << n;
  const std::uint64_t flip_all = full - 1;
  const std::uint64_t top = std::uint64_t{1} << (n - 1);
  const std::size_t half = static_cast<std::size_t>(full / 2);
  const auto& bonds = m.lattice().bonds();

  // Representatives r have the top bit clear; sector states (|r> + p|~r>)/sqrt2.
  auto diag_zz = [&](std::uint64_t bits) {
    double e = 0.0;
    for (const auto& [i, j] : bonds) e += (((bits >> i) ^ (bits >> j)) & 1u) ? 1.0 : -1.0;
    return m.J() * e;  // -J sum s_i s_j
  };
  auto msq = [&](std::uint64_t bits) {
    const double mag = static_cast<double>(n) - 2.0 * std::popcount(bits);
    return mag * mag / static_cast<double>(n * n);
  };

  for (int parity : {+1, -1}) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(half, half);
    for (std::uint64_t r = 0; r < half; ++r) {
      H(r, r) += diag_zz(r);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t f = r ^ (std::uint64_t{1} << i);
        double sign = 1.0;
        if (f & top) {
          f ^= flip_all;
          sign = parity;
        }
        H(f, r) += -m.h() * sign;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const auto& vecs = eig.eigenvectors();
    for (std::size_t k = 0; k < half; ++k) {
      double ms = 0.0;
      for (std::uint64_t r = 0; r < half; ++r) ms += vecs(r, k) * vecs(r, k) * msq(r);
      energies_.push_back(eig.eigenvalues()(k));
      m_sq_.push_back(ms);
    }
  }
  e_min_ = *std::min_element(energies_.begin(), energies_.end());
}

ThermalTfim TfimSpectrum::thermal(double tau) const {
  if (tau < 0.0) throw ValidationError("ed_thermal_tfim: tau must be >= 0");
  double z = 0.0, e = 0.0, ms = 0.0;
  for (std::size_t k = 0; k < energies_.size(); ++k) {
    const double w = std::exp(-tau * (energies_[k] - e_min_));
    z += w;
    e += w * energies_[k];
    ms += w * m_sq_[k];
  }
  return {e / z, ms / z};
}

ThermalTfim ed_thermal_tfim(const TFIMModel& m, double tau) { return TfimSpectrum(m).thermal(tau); }

}  // namespace itwa
