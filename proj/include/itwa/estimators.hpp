#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "itwa/models.hpp"
#include "itwa/sde.hpp"

namespace itwa {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// sum v_k w_k / sum w_k with w_k = exp(L_k - max L). Shift-invariant in L.
double reweighted_mean(std::span<const double> values, std::span<const double> log_weights);

/// (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> log_weights);

/// Leave-one-out jackknife standard deviation of reweighted_mean.
double jackknife_error(std::span<const double> values, std::span<const double> log_weights);

/// Standard deviation of reweighted_mean over `resamples` bootstrap draws.
double bootstrap_error(std::span<const double> values, std::span<const double> log_weights,
                       std::size_t resamples, std::uint64_t seed);

enum class ErrorMethod { jackknife, bootstrap };

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double ess = 0.0;
  std::size_t n_traj = 0;
};

/// Reweighted mean with error bar and ESS.
Estimate estimate(std::span<const double> values, std::span<const double> log_weights,
                  ErrorMethod method = ErrorMethod::jackknife);

/// <H> of the physical Hamiltonian: per-trajectory Weyl energy plus the model's reporting offset.
Estimate energy_observable(const Model& model, const WeightedSnapshot& snapshot,
                           ErrorMethod method = ErrorMethod::jackknife);

/// <m^2> with per-trajectory symbol (N + 3[(sum cos)^2 - sum cos^2]) / N^2.
Estimate magnetization_sq(const WeightedSnapshot& snapshot, ErrorMethod method = ErrorMethod::jackknife);

/// Per-spin average of the sigma^x symbol, sqrt3 sin(theta) cos(phi).
Estimate transverse_magnetization(const WeightedSnapshot& snapshot,
                                  ErrorMethod method = ErrorMethod::jackknife);

/// log(Z(tau)/Z(0)) from the mean of the unshifted trajectory weights.
double log_partition_ratio(const WeightedSnapshot& snapshot);

struct SeriesRow {
  double tau = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
  double ess = 0.0;
  std::size_t n_traj = 0;
};

/// One observable tabulated on an increasing tau grid.
class ObservableSeries {
 public:
  ObservableSeries() = default;
  explicit ObservableSeries(std::string name) : name_(std::move(name)) {}

  /// Throws ValidationError if tau does not increase or the row is malformed.
  void push_back(const SeriesRow& row);
  void push_back(double tau, const Estimate& e) { push_back({tau, e.value, e.stderr_, e.ess, e.n_traj}); }

  const std::string& name() const { return name_; }
  const std::vector<SeriesRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::string name_;
  std::vector<SeriesRow> rows_;
};

/// Mean over rows with tau in [tau_min, tau_max]. The error is the larger of
/// the mean row stderr (rows share trajectories, so they are treated as fully
/// correlated) and the standard error of the row scatter.
Estimate window_average(const ObservableSeries& series, double tau_min, double tau_max);

/// Per-trajectory values restricted to valid trajectories, paired with their log-weights.
struct WeightedValues {
  std::vector<double> values;
  std::vector<double> log_weights;
};

}  // namespace itwa
