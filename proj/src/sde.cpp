#include "itwa/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "itwa/errors.hpp"
#include "itwa/random.hpp"

namespace itwa {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Per-trajectory integration state shared between step() and evolve().
struct Integrator {
  const Model& model;
  double d_tau;
  std::uint64_t seed;
  std::vector<double> noise;
  std::vector<double> scratch;

  Integrator(const Model& m, double dt, std::uint64_t s)
      : model(m), d_tau(dt), seed(s), noise(m.noise_count()), scratch(m.scratch_count()) {}

  /// Runs steps [first, last) on one trajectory. Returns false if it went non-finite.
  bool run(std::size_t traj, std::span<double> coords, double& log_weight, std::uint64_t first,
           std::uint64_t last) {
    const double sqrt_dt = std::sqrt(d_tau);
    for (std::uint64_t k = first; k < last; ++k) {
      if (!noise.empty()) {
        CounterRng rng(seed, traj, static_cast<std::uint32_t>(k + 1));
        for (auto& w : noise) w = sqrt_dt * rng.normal();
      }
      const double energy = model.advance(coords, d_tau, noise, scratch);
      log_weight -= energy * d_tau;
    }
    if (!std::isfinite(log_weight)) return false;
    return std::all_of(coords.begin(), coords.end(), [](double v) { return std::isfinite(v); });
  }
};

void check_sizes(const WeightedSnapshot& s, const Model& m) {
  if (s.states.n_spins() != m.n_spins()) {
    throw ValidationError("snapshot has " + std::to_string(s.states.n_spins()) + " spins, model has " +
                          std::to_string(m.n_spins()));
  }
}

void stabilize(WeightedSnapshot& snap, const std::vector<double>& raw) {
  double max_l = kNegInf;
  for (std::size_t t = 0; t < raw.size(); ++t)
    if (snap.valid[t]) max_l = std::max(max_l, raw[t]);
  if (max_l == kNegInf) max_l = 0.0;
  snap.log_weight_offset = max_l;
  snap.log_weights.resize(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t)
    snap.log_weights[t] = snap.valid[t] ? raw[t] - max_l : kNegInf;
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi, w] { fn(lo, hi, w); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::size_t WeightedSnapshot::n_valid() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

std::uint64_t step_count(double tau, double d_tau) {
  return static_cast<std::uint64_t>(std::llround(tau / d_tau));
}

void validate(const Schedule& s) {
  if (!(s.d_tau > 0.0) || !std::isfinite(s.d_tau)) throw ValidationError("schedule: d_tau must be > 0");
  if (s.n_traj == 0) throw ValidationError("schedule: n_traj must be >= 1");
  if (s.snapshot_taus.empty()) throw ValidationError("schedule: snapshot_taus is empty");
  double prev = -1.0;
  for (double tau : s.snapshot_taus) {
    if (!std::isfinite(tau) || tau < 0.0) throw ValidationError("schedule: snapshot taus must be >= 0");
    if (tau <= prev) throw ValidationError("schedule: snapshot taus must be strictly increasing");
    const double k = std::round(tau / s.d_tau);
    if (std::abs(k * s.d_tau - tau) > 1e-12 * std::max(1.0, tau)) {
      throw ValidationError("schedule: snapshot tau " + std::to_string(tau) +
                            " is not an integer multiple of d_tau " + std::to_string(s.d_tau));
    }
    if (k > static_cast<double>(std::numeric_limits<std::uint32_t>::max() - 1)) {
      throw ValidationError("schedule: too many steps");
    }
    prev = tau;
  }
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("ITWA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

WeightedSnapshot initial_snapshot(const Model& model, std::size_t n_traj, std::uint64_t seed) {
  WeightedSnapshot snap;
  snap.states = sample_fully_mixed(model.n_spins(), n_traj, seed);
  snap.log_weights.assign(n_traj, 0.0);
  snap.valid.assign(n_traj, 1);
  return snap;
}

WeightedSnapshot step(const WeightedSnapshot& in, const Model& model, double d_tau, std::uint64_t seed) {
  if (!(d_tau > 0.0)) throw ValidationError("step: d_tau must be > 0");
  check_sizes(in, model);
  WeightedSnapshot out = in;
  Integrator integ(model, d_tau, seed);
  std::vector<double> coords(model.coord_count());
  for (std::size_t t = 0; t < in.n_traj(); ++t) {
    if (!out.valid[t]) continue;
    model.load(in.states.trajectory(t), coords);
    double l = out.log_weights[t];
    if (integ.run(t, coords, l, in.steps, in.steps + 1)) {
      model.store(coords, out.states.trajectory(t));
      out.log_weights[t] = l;
    } else {
      out.valid[t] = 0;
      out.log_weights[t] = kNegInf;
    }
  }
  out.tau = in.tau + d_tau;
  out.steps = in.steps + 1;
  return out;
}

EvolveReport evolve(const Model& model, const Schedule& schedule, const SnapshotSink& sink) {
  validate(schedule);
  const std::size_t n_traj = schedule.n_traj;
  const std::size_t cc = model.coord_count();
  const std::size_t workers = schedule.threads ? schedule.threads : default_worker_count();

  WeightedSnapshot snap = initial_snapshot(model, n_traj, schedule.seed);
  std::vector<double> coords(n_traj * cc);
  std::vector<double> raw(n_traj, 0.0);
  for (std::size_t t = 0; t < n_traj; ++t) {
    model.load(snap.states.trajectory(t), std::span<double>(coords.data() + t * cc, cc));
  }

  std::uint64_t done = 0;
  for (double tau : schedule.snapshot_taus) {
    const std::uint64_t target = step_count(tau, schedule.d_tau);
    parallel_for(n_traj, workers, [&](std::size_t lo, std::size_t hi, std::size_t) {
      Integrator integ(model, schedule.d_tau, schedule.seed);
      for (std::size_t t = lo; t < hi; ++t) {
        if (!snap.valid[t]) continue;
        std::span<double> x(coords.data() + t * cc, cc);
        if (target > done && !integ.run(t, x, raw[t], done, target)) {
          snap.valid[t] = 0;
          continue;
        }
        model.store(x, snap.states.trajectory(t));
      }
    });
    done = target;
    snap.tau = tau;
    snap.steps = target;
    stabilize(snap, raw);
    sink(snap);
  }

  EvolveReport report;
  report.n_traj = n_traj;
  report.n_invalid = n_traj - snap.n_valid();
  return report;
}

std::vector<WeightedSnapshot> evolve(const Model& model, const Schedule& schedule, EvolveReport* report) {
  std::vector<WeightedSnapshot> out;
  const auto r = evolve(model, schedule, [&out](const WeightedSnapshot& s) { out.push_back(s); });
  if (report) *report = r;
  return out;
}

}  // namespace itwa
