#include "itwa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "itwa/errors.hpp"
#include "itwa/random.hpp"

namespace itwa {
namespace {

void check_inputs(std::span<const double> values, std::span<const double> log_weights,
                  std::size_t min_len, const char* who) {
  if (values.size() != log_weights.size()) {
    throw ValidationError(std::string(who) + ": values and log_weights differ in length");
  }
  if (values.size() < min_len) {
    throw ValidationError(std::string(who) + ": need at least " + std::to_string(min_len) + " samples");
  }
}

double max_log_weight(std::span<const double> log_weights, const char* who) {
  if (log_weights.empty()) throw ValidationError(std::string(who) + ": empty input");
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(m)) throw ValidationError(std::string(who) + ": no finite log-weight");
  return m;
}

template <class Fn>
WeightedValues collect(const WeightedSnapshot& snap, Fn&& per_trajectory) {
  WeightedValues out;
  out.values.reserve(snap.n_traj());
  out.log_weights.reserve(snap.n_traj());
  for (std::size_t t = 0; t < snap.n_traj(); ++t) {
    if (!snap.valid[t]) continue;
    out.values.push_back(per_trajectory(snap.states.trajectory(t)));
    out.log_weights.push_back(snap.log_weights[t]);
  }
  if (out.values.empty()) throw NumericalError("snapshot has no valid trajectories");
  return out;
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double reweighted_mean(std::span<const double> values, std::span<const double> log_weights) {
  check_inputs(values, log_weights, 1, "reweighted_mean");
  const double m = max_log_weight(log_weights, "reweighted_mean");
  CompensatedSum num, den;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double w = std::exp(log_weights[k] - m);
    num.add(w * values[k]);
    den.add(w);
  }
  return num.value() / den.value();
}

double effective_sample_size(std::span<const double> log_weights) {
  const double m = max_log_weight(log_weights, "effective_sample_size");
  CompensatedSum s1, s2;
  for (double l : log_weights) {
    const double w = std::exp(l - m);
    s1.add(w);
    s2.add(w * w);
  }
  return s1.value() * s1.value() / s2.value();
}

double jackknife_error(std::span<const double> values, std::span<const double> log_weights) {
  check_inputs(values, log_weights, 2, "jackknife_error");
  const std::size_t n = values.size();
  const double m = max_log_weight(log_weights, "jackknife_error");
  const auto top = static_cast<std::size_t>(
      std::max_element(log_weights.begin(), log_weights.end()) - log_weights.begin());

  std::vector<double> w(n), wv(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = std::exp(log_weights[k] - m);
    wv[k] = w[k] * values[k];
  }
  // Leave-one-out sums from compensated prefix and suffix sums avoid the
  // cancellation of total - w_i when one weight dominates.
  std::vector<double> pre_w(n + 1, 0.0), pre_wv(n + 1, 0.0), suf_w(n + 1, 0.0), suf_wv(n + 1, 0.0);
  {
    CompensatedSum a, b;
    for (std::size_t k = 0; k < n; ++k) {
      a.add(w[k]);
      b.add(wv[k]);
      pre_w[k + 1] = a.value();
      pre_wv[k + 1] = b.value();
    }
  }
  {
    CompensatedSum a, b;
    for (std::size_t k = n; k-- > 0;) {
      a.add(w[k]);
      b.add(wv[k]);
      suf_w[k] = a.value();
      suf_wv[k] = b.value();
    }
  }
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == top) continue;
    loo[i] = (pre_wv[i] + suf_wv[i + 1]) / (pre_w[i] + suf_w[i + 1]);
  }
  {
    // Without the top weight the rest may underflow relative to it; rescale by their own max.
    std::vector<double> rest_v, rest_l;
    rest_v.reserve(n - 1);
    rest_l.reserve(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == top) continue;
      rest_v.push_back(values[k]);
      rest_l.push_back(log_weights[k]);
    }
    loo[top] = reweighted_mean(rest_v, rest_l);
  }
  CompensatedSum mean_sum;
  for (double v : loo) mean_sum.add(v);
  const double mean = mean_sum.value() / static_cast<double>(n);
  CompensatedSum ss;
  for (double v : loo) ss.add((v - mean) * (v - mean));
  return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss.value());
}

double bootstrap_error(std::span<const double> values, std::span<const double> log_weights,
                       std::size_t resamples, std::uint64_t seed) {
  check_inputs(values, log_weights, 2, "bootstrap_error");
  if (resamples < 2) throw ValidationError("bootstrap_error: need at least 2 resamples");
  const std::size_t n = values.size();
  std::vector<double> v(n), l(n), means(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    CounterRng rng(seed, b, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto idx = rng.below(n);
      v[k] = values[idx];
      l[k] = log_weights[idx];
    }
    means[b] = reweighted_mean(v, l);
  }
  CompensatedSum s;
  for (double x : means) s.add(x);
  const double mean = s.value() / static_cast<double>(resamples);
  CompensatedSum ss;
  for (double x : means) ss.add((x - mean) * (x - mean));
  return std::sqrt(ss.value() / static_cast<double>(resamples - 1));
}

Estimate estimate(std::span<const double> values, std::span<const double> log_weights, ErrorMethod method) {
  Estimate e;
  e.value = reweighted_mean(values, log_weights);
  e.ess = effective_sample_size(log_weights);
  e.n_traj = values.size();
  if (values.size() >= 2) {
    e.stderr_ = method == ErrorMethod::jackknife ? jackknife_error(values, log_weights)
                                                 : bootstrap_error(values, log_weights, 200, 0x5eed);
  }
  return e;
}

Estimate energy_observable(const Model& model, const WeightedSnapshot& snap, ErrorMethod method) {
  if (snap.states.n_spins() != model.n_spins()) {
    throw ValidationError("energy_observable: snapshot and model sizes differ");
  }
  const double offset = model.reported_energy_offset();
  auto wv = collect(snap, [&](std::span<const SpinAngles> a) { return model.weyl_energy(a) + offset; });
  return estimate(wv.values, wv.log_weights, method);
}

Estimate magnetization_sq(const WeightedSnapshot& snap, ErrorMethod method) {
  const double n = static_cast<double>(snap.states.n_spins());
  if (n == 0) throw ValidationError("magnetization_sq: empty snapshot");
  auto wv = collect(snap, [n](std::span<const SpinAngles> a) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& s : a) {
      const double c = std::cos(s.theta);
      sum += c;
      sum_sq += c * c;
    }
    return (n + 3.0 * (sum * sum - sum_sq)) / (n * n);
  });
  return estimate(wv.values, wv.log_weights, method);
}

Estimate transverse_magnetization(const WeightedSnapshot& snap, ErrorMethod method) {
  const double n = static_cast<double>(snap.states.n_spins());
  auto wv = collect(snap, [n](std::span<const SpinAngles> a) {
    double sum = 0.0;
    for (const auto& s : a) sum += pauli_weyl(PauliAxis::x, s);
    return sum / n;
  });
  return estimate(wv.values, wv.log_weights, method);
}

double log_partition_ratio(const WeightedSnapshot& snap) {
  std::vector<double> l;
  for (std::size_t t = 0; t < snap.n_traj(); ++t)
    if (snap.valid[t]) l.push_back(snap.log_weights[t]);
  const double m = max_log_weight(l, "log_partition_ratio");
  CompensatedSum s;
  for (double x : l) s.add(std::exp(x - m));
  return snap.log_weight_offset + m + std::log(s.value() / static_cast<double>(l.size()));
}

void ObservableSeries::push_back(const SeriesRow& row) {
  if (!rows_.empty() && !(row.tau > rows_.back().tau)) {
    throw ValidationError("ObservableSeries: tau must be strictly increasing");
  }
  if (!(row.stderr_ >= 0.0)) throw ValidationError("ObservableSeries: stderr must be >= 0");
  rows_.push_back(row);
}

Estimate window_average(const ObservableSeries& series, double tau_min, double tau_max) {
  CompensatedSum sum, se_sum;
  std::vector<double> vals;
  Estimate e;
  e.ess = std::numeric_limits<double>::infinity();
  for (const auto& r : series.rows()) {
    if (r.tau < tau_min || r.tau > tau_max) continue;
    vals.push_back(r.value);
    sum.add(r.value);
    se_sum.add(r.stderr_);
    e.ess = std::min(e.ess, r.ess);
    e.n_traj = std::max(e.n_traj, r.n_traj);
  }
  if (vals.empty()) {
    throw ValidationError("window_average: no rows with tau in [" + std::to_string(tau_min) + ", " +
                          std::to_string(tau_max) + "]");
  }
  const double n = static_cast<double>(vals.size());
  e.value = sum.value() / n;
  const double propagated = se_sum.value() / n;
  double scatter = 0.0;
  if (vals.size() > 1) {
    CompensatedSum ss;
    for (double v : vals) ss.add((v - e.value) * (v - e.value));
    scatter = std::sqrt(ss.value() / (n - 1.0) / n);
  }
  e.stderr_ = std::max(propagated, scatter);
  return e;
}

}  // namespace itwa
