#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "itwa/estimators.hpp"
#include "itwa/sde.hpp"

namespace itwa::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kSizeGuard = 3,
  kNumerical = 4,
};

/// Everything needed to reproduce a simulation run. Energies and h are given
/// in the same units as J; the tau grid is in units of 1/J.
struct RunConfig {
  std::string model = "ising-graph";  // or "tfim"
  std::string graph_path;
  std::string lattice = "8";
  double J = 1.0;
  double h = 0.0;
  double d_tau = 1e-3;
  std::vector<double> taus;
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::vector<std::string> observables{"energy"};
  std::string error_method = "jackknife";
  std::optional<double> e0;
  double invalid_tolerance = 1e-3;
  std::string csv_path;
  std::string manifest_path;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// "0:10:0.5" (inclusive start:stop:step) or "0,0.5,1".
std::vector<double> parse_tau_grid(const std::string& text);

struct RunResult {
  std::map<std::string, ObservableSeries> series;
  EvolveReport report;
};

/// Builds the model, integrates the ensemble and tabulates the requested observables.
RunResult simulate(const RunConfig& config);

/// CSV text for a run, rows ordered by tau then by the configured observable order.
std::string run_csv(const RunConfig& config, const RunResult& result);

int cmd_graph(std::size_t n, std::size_t k, std::uint64_t seed, const std::string& out_path, std::ostream& log);
int cmd_run(const RunConfig& config, std::ostream& log);

struct OracleConfig {
  std::string model = "ising-graph";
  std::string graph_path;
  std::string lattice = "8";
  double J = 1.0;
  double h = 0.0;
  std::vector<double> taus;
  std::string method = "enumeration";  // or "annealing"; TFIM always uses ED
  std::size_t restarts = 64;
  std::size_t sweeps = 1000;
  std::uint64_t seed = 1;
  std::string csv_path;
};
int cmd_oracle(const OracleConfig& config, std::ostream& log);

struct SweepConfig {
  RunConfig base;
  std::string param = "h";
  std::vector<double> values;
  double window_min = 0.0;
  double window_max = 0.0;
  std::string observable = "m2";
  std::string csv_path;
};
struct SweepPoint {
  double param = 0.0;
  Estimate estimate;
};
std::vector<SweepPoint> sweep(const SweepConfig& config);
int cmd_sweep(const SweepConfig& config, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace itwa::cli
