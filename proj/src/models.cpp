#include "itwa/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "itwa/errors.hpp"

namespace itwa {
namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ValidationError(std::string(what) + ": state has " + std::to_string(got) +
                          " spins, model has " + std::to_string(want));
  }
}

double wrap_phi(double phi) {
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  return phi >= kTwoPi ? 0.0 : phi;
}

}  // namespace

// --- Ising on graphs ---------------------------------------------------------

IsingGraphModel::IsingGraphModel(RegularGraph graph, double J) : graph_(std::move(graph)), J_(J) {
  if (!(J_ > 0.0)) throw ValidationError("IsingGraphModel: J must be > 0 (antiferromagnetic)");
}

void IsingGraphModel::load(std::span<const SpinAngles> angles, std::span<double> coords) const {
  const double umax = std::cos(kPoleEpsilon);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    coords[i] = std::clamp(std::cos(angles[i].theta), -umax, umax);
  }
}

void IsingGraphModel::store(std::span<const double> coords, std::span<SpinAngles> angles) const {
  for (std::size_t i = 0; i < angles.size(); ++i) angles[i].theta = std::acos(coords[i]);
}

double IsingGraphModel::weyl_energy(std::span<const SpinAngles> angles) const {
  return ising_weyl_energy(*this, angles);
}

double IsingGraphModel::advance(std::span<double> u, double dtau, std::span<const double>,
                                std::span<double> scratch) const {
  const std::size_t n = graph_.n();
  auto field = scratch.first(n);
  double energy2 = 0.0;  // sum_i u_i * field_i counts each edge twice
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (auto j : graph_.neighbors(i)) f += u[j];
    field[i] = f;
    energy2 += u[i] * f;
  }
  const double umax = std::cos(kPoleEpsilon);
  for (std::size_t i = 0; i < n; ++i) {
    double du = J_ * (3.0 * u[i] * u[i] - 1.0) * field[i] * dtau;
    du = std::clamp(du, -kMaxDriftStep, kMaxDriftStep);
    u[i] = std::clamp(u[i] + du, -umax, umax);
  }
  return 1.5 * J_ * energy2;
}

double ising_weyl_energy(const IsingGraphModel& m, std::span<const SpinAngles> angles) {
  require_size(angles.size(), m.n_spins(), "ising_weyl_energy");
  double sum = 0.0;
  for (const auto& [i, j] : m.graph().edges()) {
    sum += std::cos(angles[i].theta) * std::cos(angles[j].theta);
  }
  return 3.0 * m.J() * sum;
}

std::vector<double> ising_drift(const IsingGraphModel& m, std::span<const SpinAngles> angles) {
  require_size(angles.size(), m.n_spins(), "ising_drift");
  std::vector<double> out(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    double field = 0.0;
    for (auto j : m.graph().neighbors(i)) field += std::cos(angles[j].theta);
    const double s = std::max(std::sin(angles[i].theta), std::sin(kPoleEpsilon));
    out[i] = -m.J() * (2.0 / s - 3.0 * s) * field;
  }
  return out;
}

std::vector<double> ising_drift_u(const IsingGraphModel& m, std::span<const double> u) {
  require_size(u.size(), m.n_spins(), "ising_drift_u");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double field = 0.0;
    for (auto j : m.graph().neighbors(i)) field += u[j];
    out[i] = m.J() * (3.0 * u[i] * u[i] - 1.0) * field;
  }
  return out;
}

// --- lattices ----------------------------------------------------------------

LatticeSpec::LatticeSpec(std::vector<std::size_t> lengths, Boundary boundary)
    : lengths_(std::move(lengths)), boundary_(boundary) {
  if (lengths_.size() > 2) throw ValidationError("lattice dimension must be 0, 1 or 2");
  for (auto L : lengths_) {
    if (L == 0) throw ValidationError("lattice side length must be >= 1");
    if (boundary_ == Boundary::periodic && L < 3) {
      throw ValidationError("periodic lattice sides must be >= 3 (got " + std::to_string(L) +
                            "); use open boundaries for shorter sides");
    }
    n_sites_ *= L;
  }
  const std::size_t d = lengths_.size();
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t a = 1; a < d; ++a) stride[a] = stride[a - 1] * lengths_[a - 1];
  for (std::size_t site = 0; site < n_sites_; ++site) {
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t coord = (site / stride[a]) % lengths_[a];
      std::size_t next;
      if (coord + 1 < lengths_[a]) {
        next = site + stride[a];
      } else if (boundary_ == Boundary::periodic) {
        next = site - coord * stride[a];
      } else {
        continue;
      }
      bonds_.emplace_back(std::min(site, next), std::max(site, next));
    }
  }
  std::sort(bonds_.begin(), bonds_.end());
  std::vector<std::size_t> deg(n_sites_, 0);
  for (const auto& [i, j] : bonds_) {
    ++deg[i];
    ++deg[j];
  }
  nbr_start_.assign(n_sites_ + 1, 0);
  for (std::size_t i = 0; i < n_sites_; ++i) nbr_start_[i + 1] = nbr_start_[i] + deg[i];
  nbr_.assign(nbr_start_.back(), 0);
  std::vector<std::size_t> fill(nbr_start_.begin(), nbr_start_.end() - 1);
  for (const auto& [i, j] : bonds_) {
    nbr_[fill[i]++] = j;
    nbr_[fill[j]++] = i;
  }
}

std::string LatticeSpec::to_string() const {
  if (lengths_.empty()) return "site";
  std::ostringstream os;
  for (std::size_t a = 0; a < lengths_.size(); ++a) os << (a ? "x" : "") << lengths_[a];
  os << (boundary_ == Boundary::periodic ? ":periodic" : ":open");
  return os.str();
}

LatticeSpec LatticeSpec::parse(const std::string& text) {
  if (text == "site") return single_site();
  std::string dims = text;
  Boundary b = Boundary::periodic;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    dims = text.substr(0, colon);
    const std::string bc = text.substr(colon + 1);
    if (bc == "open") {
      b = Boundary::open;
    } else if (bc != "periodic") {
      throw ValidationError("unknown boundary '" + bc + "' (expected periodic or open)");
    }
  }
  std::vector<std::size_t> lengths;
  std::stringstream ss(dims);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(part, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (part.empty() || pos != part.size()) throw ValidationError("bad lattice spec '" + text + "'");
    lengths.push_back(v);
  }
  return LatticeSpec(std::move(lengths), b);
}

// --- TFIM --------------------------------------------------------------------

std::vector<double> phi_diffusion_matrix(const LatticeSpec& lattice, double J) {
  const std::size_t n = lattice.n_sites();
  const double diag = 2.0 * static_cast<double>(lattice.dimension()) * J;
  std::vector<double> D(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) D[i * n + i] = diag;
  for (const auto& [i, j] : lattice.bonds()) {
    D[i * n + j] -= J;
    D[j * n + i] -= J;
  }
  return D;
}

PhiDiffusionFactor phi_diffusion_factor(const LatticeSpec& lattice, double J) {
  const std::size_t n = lattice.n_sites();
  if (n == 0) throw ValidationError("phi_diffusion_factor: empty lattice");
  const auto D = phi_diffusion_matrix(lattice, J);
  Eigen::MatrixXd Dm(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Dm(i, j) = D[i * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Dm);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const Eigen::MatrixXd B = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  PhiDiffusionFactor f;
  f.n = n;
  f.matrix.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) f.matrix[i * n + j] = B(i, j);
  f.eigenvalues.assign(lambda.data(), lambda.data() + n);
  return f;
}

TFIMModel::TFIMModel(LatticeSpec lattice, double J, double h)
    : lattice_(std::move(lattice)), J_(J), h_(h) {
  if (!(J_ >= 0.0) || !std::isfinite(J_)) throw ValidationError("TFIMModel: J must be >= 0");
  if (!(h_ >= 0.0) || !std::isfinite(h_)) throw ValidationError("TFIMModel: h must be >= 0");
  phi_factor_ = phi_diffusion_factor(lattice_, J_);
}

void TFIMModel::load(std::span<const SpinAngles> angles, std::span<double> coords) const {
  const std::size_t n = n_spins();
  for (std::size_t i = 0; i < n; ++i) {
    coords[i] = std::clamp(angles[i].theta, kPoleEpsilon, kPi - kPoleEpsilon);
    coords[n + i] = angles[i].phi;
  }
}

void TFIMModel::store(std::span<const double> coords, std::span<SpinAngles> angles) const {
  const std::size_t n = n_spins();
  for (std::size_t i = 0; i < n; ++i) angles[i] = {coords[i], coords[n + i]};
}

double TFIMModel::weyl_energy(std::span<const SpinAngles> angles) const {
  return tfim_weyl_energy(*this, angles);
}

double TFIMModel::advance(std::span<double> x, double dtau, std::span<const double> dw,
                          std::span<double> scratch) const {
  const std::size_t n = n_spins();
  const double d = static_cast<double>(lattice_.dimension());
  auto theta = x.first(n);
  auto phi = x.subspan(n, n);
  auto c = scratch.subspan(0, n);
  auto s = scratch.subspan(n, n);
  auto cphi = scratch.subspan(2 * n, n);
  auto sphi = scratch.subspan(3 * n, n);
  auto field = scratch.subspan(4 * n, n);
  auto phi_noise = scratch.subspan(5 * n, n);

  double field_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = std::cos(theta[i]);
    s[i] = std::sin(theta[i]);
    cphi[i] = std::cos(phi[i]);
    sphi[i] = std::sin(phi[i]);
    field_term += s[i] * cphi[i];
  }
  double bond_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (auto j : lattice_.neighbors(i)) f += c[j];
    field[i] = f;
    bond_term += c[i] * f;  // each bond twice
  }
  const double energy = -h_ * kSqrt3 * field_term - 1.5 * J_ * bond_term - shift();

  const auto dw_theta = dw.first(n);
  const auto dw_phi = dw.subspan(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* row = phi_factor_.matrix.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * dw_phi[j];
    phi_noise[i] = acc;
  }

  const double h3 = h_ / kSqrt3;
  for (std::size_t i = 0; i < n; ++i) {
    const double drift_theta = -J_ * s[i] * field[i] + h3 * c[i] * cphi[i] + d * J_ * s[i] * c[i];
    const double a = 4.0 * J_ * c[i] * field[i] + 4.0 * h3 * s[i] * cphi[i] - 2.0 * d * J_ * s[i] * s[i];
    const double amp = a > 0.0 ? std::sqrt(a) : 0.0;
    double th = theta[i] + std::clamp(drift_theta * dtau, -kMaxDriftStep, kMaxDriftStep) + amp * dw_theta[i];
    double ph = phi[i] - h3 * sphi[i] / s[i] * dtau + phi_noise[i];
    // Crossing a pole continues on the sphere at the antipodal azimuth.
    while (th < 0.0 || th > kPi) {
      th = th < 0.0 ? -th : 2.0 * kPi - th;
      ph += kPi;
    }
    theta[i] = std::clamp(th, kPoleEpsilon, kPi - kPoleEpsilon);
    phi[i] = wrap_phi(ph);
  }
  return energy;
}

double tfim_weyl_energy(const TFIMModel& m, std::span<const SpinAngles> angles) {
  require_size(angles.size(), m.n_spins(), "tfim_weyl_energy");
  double field_term = 0.0;
  for (const auto& a : angles) field_term += std::sin(a.theta) * std::cos(a.phi);
  double bond_term = 0.0;
  for (const auto& [i, j] : m.lattice().bonds()) {
    bond_term += std::cos(angles[i].theta) * std::cos(angles[j].theta);
  }
  return -m.h() * kSqrt3 * field_term - 3.0 * m.J() * bond_term - m.shift();
}

TfimDrift tfim_drift(const TFIMModel& m, std::span<const SpinAngles> angles) {
  require_size(angles.size(), m.n_spins(), "tfim_drift");
  const std::size_t n = angles.size();
  const double d = static_cast<double>(m.lattice().dimension());
  const double h3 = m.h() / kSqrt3;
  TfimDrift out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double field = 0.0;
    for (auto j : m.lattice().neighbors(i)) field += std::cos(angles[j].theta);
    const double c = std::cos(angles[i].theta);
    const double s = std::sin(angles[i].theta);
    out.dtheta[i] = -m.J() * s * field + h3 * c * std::cos(angles[i].phi) + d * m.J() * s * c;
    out.dphi[i] = -h3 * std::sin(angles[i].phi) / std::max(s, std::sin(kPoleEpsilon));
  }
  return out;
}

std::vector<double> tfim_theta_noise(const TFIMModel& m, std::span<const SpinAngles> angles) {
  require_size(angles.size(), m.n_spins(), "tfim_theta_noise");
  const std::size_t n = angles.size();
  const double d = static_cast<double>(m.lattice().dimension());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double field = 0.0;
    for (auto j : m.lattice().neighbors(i)) field += std::cos(angles[j].theta);
    const double c = std::cos(angles[i].theta);
    const double s = std::sin(angles[i].theta);
    const double a = 4.0 * m.J() * c * field + 4.0 * m.h() / kSqrt3 * s * std::cos(angles[i].phi) -
                     2.0 * d * m.J() * s * s;
    out[i] = a > 0.0 ? std::sqrt(a) : 0.0;
  }
  return out;
}

}  // namespace itwa
