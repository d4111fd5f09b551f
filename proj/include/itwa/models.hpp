#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "itwa/graphs.hpp"
#include "itwa/phasespace.hpp"

namespace itwa {

/// Angles are kept in [kPoleEpsilon, pi - kPoleEpsilon] so that 1/sin(theta)
/// terms stay finite.
inline constexpr double kPoleEpsilon = 1e-6;
/// Largest deterministic change of theta (or cos theta) allowed in one step.
inline constexpr double kMaxDriftStep = 0.1;

/// Interface consumed by the SDE integrator.
///
/// Each model chooses its own per-trajectory integration coordinates (a flat
/// array of coord_count() doubles) and converts to and from angles only at
/// snapshot boundaries.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t n_spins() const = 0;
  virtual std::size_t coord_count() const = 0;
  /// Number of independent Wiener channels consumed per step.
  virtual std::size_t noise_count() const = 0;
  virtual std::size_t scratch_count() const { return 0; }

  virtual void load(std::span<const SpinAngles> angles, std::span<double> coords) const = 0;
  /// Writes the angles represented by `coords`. Angles a model does not
  /// integrate are left untouched.
  virtual void store(std::span<const double> coords, std::span<SpinAngles> angles) const = 0;

  /// Weyl symbol of the Hamiltonian used in trajectory weights.
  virtual double weyl_energy(std::span<const SpinAngles> angles) const = 0;
  /// Constant added to weyl_energy when reporting <H> of the physical Hamiltonian.
  virtual double reported_energy_offset() const { return 0.0; }

  /// One Ito-Euler step x <- x + A dtau + B dW. `dw` holds noise_count()
  /// increments with variance dtau. Returns the Weyl energy at the pre-step
  /// coordinates.
  virtual double advance(std::span<double> coords, double dtau, std::span<const double> dw,
                         std::span<double> scratch) const = 0;
};

// --- antiferromagnetic Ising model on a regular graph ----------------------

class IsingGraphModel final : public Model {
 public:
  IsingGraphModel(RegularGraph graph, double J);

  const RegularGraph& graph() const { return graph_; }
  double J() const { return J_; }

  std::size_t n_spins() const override { return graph_.n(); }
  std::size_t coord_count() const override { return graph_.n(); }
  std::size_t noise_count() const override { return 0; }
  std::size_t scratch_count() const override { return graph_.n(); }

  void load(std::span<const SpinAngles> angles, std::span<double> coords) const override;
  void store(std::span<const double> coords, std::span<SpinAngles> angles) const override;
  double weyl_energy(std::span<const SpinAngles> angles) const override;
  double advance(std::span<double> coords, double dtau, std::span<const double> dw,
                 std::span<double> scratch) const override;

 private:
  RegularGraph graph_;
  double J_;
};

/// 3J sum_edges cos(theta_i) cos(theta_j).
double ising_weyl_energy(const IsingGraphModel& m, std::span<const SpinAngles> angles);

/// d theta_i / d tau = -J (2/sin - 3 sin) sum_nbr cos theta_j  (phi is frozen).
std::vector<double> ising_drift(const IsingGraphModel& m, std::span<const SpinAngles> angles);

/// Same flow in u = cos theta: du_i/dtau = J (3 u_i^2 - 1) sum_nbr u_j.
std::vector<double> ising_drift_u(const IsingGraphModel& m, std::span<const double> u);

// --- transverse-field Ising model on a hypercubic lattice ------------------

enum class Boundary { periodic, open };

/// Chain (d = 1) or square lattice (d = 2). d = 0 is a single isolated site.
class LatticeSpec {
 public:
  LatticeSpec(std::vector<std::size_t> lengths, Boundary boundary = Boundary::periodic);

  static LatticeSpec single_site() { return LatticeSpec({}, Boundary::open); }

  std::size_t dimension() const { return lengths_.size(); }
  const std::vector<std::size_t>& lengths() const { return lengths_; }
  Boundary boundary() const { return boundary_; }
  std::size_t n_sites() const { return n_sites_; }

  /// Undirected nearest-neighbour bonds (i, j); each appears once.
  const std::vector<Edge>& bonds() const { return bonds_; }
  std::span<const std::size_t> neighbors(std::size_t i) const {
    return {nbr_.data() + nbr_start_[i], nbr_start_[i + 1] - nbr_start_[i]};
  }

  /// "8", "4x4", "3x4:open".
  std::string to_string() const;
  static LatticeSpec parse(const std::string& text);

 private:
  std::vector<std::size_t> lengths_;
  Boundary boundary_;
  std::size_t n_sites_ = 1;
  std::vector<Edge> bonds_;
  std::vector<std::size_t> nbr_start_;
  std::vector<std::size_t> nbr_;
};

/// Symmetric square-root factor B of the phi-phi diffusion block, D = B B^T.
struct PhiDiffusionFactor {
  std::size_t n = 0;
  std::vector<double> matrix;  // row-major n x n
  std::vector<double> eigenvalues;  // of D before clipping, ascending

  double operator()(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
};

class TFIMModel final : public Model {
 public:
  TFIMModel(LatticeSpec lattice, double J, double h);

  const LatticeSpec& lattice() const { return lattice_; }
  double J() const { return J_; }
  double h() const { return h_; }
  const PhiDiffusionFactor& phi_factor() const { return phi_factor_; }

  std::size_t n_spins() const override { return lattice_.n_sites(); }
  std::size_t coord_count() const override { return 2 * n_spins(); }
  std::size_t noise_count() const override { return 2 * n_spins(); }
  std::size_t scratch_count() const override { return 6 * n_spins(); }

  void load(std::span<const SpinAngles> angles, std::span<double> coords) const override;
  void store(std::span<const double> coords, std::span<SpinAngles> angles) const override;
  double weyl_energy(std::span<const SpinAngles> angles) const override;
  double reported_energy_offset() const override { return shift(); }
  double advance(std::span<double> coords, double dtau, std::span<const double> dw,
                 std::span<double> scratch) const override;

  /// d J N: magnitude of the identity shift folded into the simulated Hamiltonian.
  double shift() const {
    return static_cast<double>(lattice_.dimension()) * J_ * static_cast<double>(n_spins());
  }

 private:
  LatticeSpec lattice_;
  double J_;
  double h_;
  PhiDiffusionFactor phi_factor_;
};

/// Shifted Weyl symbol: -h sqrt3 sum sin cos(phi) - 3J sum_bonds cos cos - dJN.
double tfim_weyl_energy(const TFIMModel& m, std::span<const SpinAngles> angles);

struct TfimDrift {
  std::vector<double> dtheta;
  std::vector<double> dphi;
};
TfimDrift tfim_drift(const TFIMModel& m, std::span<const SpinAngles> angles);

/// Diagonal theta noise amplitudes sqrt(max(a_i, 0)); off-diagonal couplings are dropped.
std::vector<double> tfim_theta_noise(const TFIMModel& m, std::span<const SpinAngles> angles);

/// D_phiphi: 2dJ on the diagonal, -J per bond.
std::vector<double> phi_diffusion_matrix(const LatticeSpec& lattice, double J);
PhiDiffusionFactor phi_diffusion_factor(const LatticeSpec& lattice, double J);
inline PhiDiffusionFactor phi_diffusion_factor(const TFIMModel& m) {
  return phi_diffusion_factor(m.lattice(), m.J());
}

// --- decorators -------------------------------------------------------------

/// Adds a constant to another model's Weyl energy; dynamics unchanged.
class ShiftedEnergyModel final : public Model {
 public:
  ShiftedEnergyModel(std::shared_ptr<const Model> inner, double shift)
      : inner_(std::move(inner)), shift_(shift) {}

  std::size_t n_spins() const override { return inner_->n_spins(); }
  std::size_t coord_count() const override { return inner_->coord_count(); }
  std::size_t noise_count() const override { return inner_->noise_count(); }
  std::size_t scratch_count() const override { return inner_->scratch_count(); }
  void load(std::span<const SpinAngles> a, std::span<double> x) const override { inner_->load(a, x); }
  void store(std::span<const double> x, std::span<SpinAngles> a) const override { inner_->store(x, a); }
  double weyl_energy(std::span<const SpinAngles> a) const override {
    return inner_->weyl_energy(a) + shift_;
  }
  double reported_energy_offset() const override { return inner_->reported_energy_offset() - shift_; }
  double advance(std::span<double> x, double dtau, std::span<const double> dw,
                 std::span<double> scratch) const override {
    return inner_->advance(x, dtau, dw, scratch) + shift_;
  }

 private:
  std::shared_ptr<const Model> inner_;
  double shift_;
};

}  // namespace itwa
