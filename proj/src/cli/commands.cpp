#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "cli/csv.hpp"
#include "itwa/errors.hpp"
#include "itwa/graphs.hpp"
#include "itwa/models.hpp"
#include "itwa/oracles.hpp"

namespace itwa::cli {
namespace {

const std::vector<std::string> kKnownObservables{"energy", "m2", "sx", "log_zeta", "delta_eps"};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

ErrorMethod parse_error_method(const std::string& s) {
  if (s == "jackknife") return ErrorMethod::jackknife;
  if (s == "bootstrap") return ErrorMethod::bootstrap;
  throw ValidationError("error_method: expected jackknife or bootstrap, got '" + s + "'");
}

/// Model in units of J = 1.
std::unique_ptr<Model> build_model(const RunConfig& c) {
  if (!(c.J > 0.0) || !std::isfinite(c.J)) throw ValidationError("J: must be > 0");
  if (c.model == "ising-graph") {
    if (c.graph_path.empty()) throw ValidationError("graph: required for model ising-graph");
    return std::make_unique<IsingGraphModel>(read_graph_file(c.graph_path), 1.0);
  }
  if (c.model == "tfim") {
    if (!(c.h >= 0.0)) throw ValidationError("h: must be >= 0");
    return std::make_unique<TFIMModel>(LatticeSpec::parse(c.lattice), 1.0, c.h / c.J);
  }
  throw ValidationError("model: expected ising-graph or tfim, got '" + c.model + "'");
}

void validate(const RunConfig& c) {
  for (const auto& o : c.observables) {
    if (std::find(kKnownObservables.begin(), kKnownObservables.end(), o) == kKnownObservables.end()) {
      throw ValidationError("observables: unknown observable '" + o + "'");
    }
    if (o == "delta_eps" && !c.e0) throw ValidationError("observables: delta_eps requires e0");
  }
  if (c.observables.empty()) throw ValidationError("observables: empty list");
  if (c.e0 && !(*c.e0 < 0.0)) throw ValidationError("e0: must be negative (a ground-state energy)");
  if (!(c.invalid_tolerance >= 0.0)) throw ValidationError("invalid_tolerance: must be >= 0");
  parse_error_method(c.error_method);
}

Schedule schedule_of(const RunConfig& c) {
  Schedule s;
  s.d_tau = c.d_tau;
  s.snapshot_taus = c.taus;
  s.n_traj = c.n_traj;
  s.seed = c.seed;
  s.threads = c.threads;
  return s;
}

Estimate log_zeta_estimate(const WeightedSnapshot& snap) {
  std::vector<double> lw;
  for (std::size_t t = 0; t < snap.n_traj(); ++t)
    if (snap.valid[t]) lw.push_back(snap.log_weights[t]);
  Estimate e;
  e.value = log_partition_ratio(snap);
  e.ess = effective_sample_size(lw);
  e.n_traj = lw.size();
  // Delta method: sd(w) / (mean(w) sqrt(n)).
  double s1 = 0.0, s2 = 0.0;
  for (double l : lw) {
    const double w = std::exp(l);
    s1 += w;
    s2 += w * w;
  }
  const double n = static_cast<double>(lw.size());
  const double mean = s1 / n;
  const double var = std::max(0.0, s2 / n - mean * mean) * n / std::max(1.0, n - 1.0);
  e.stderr_ = std::sqrt(var / n) / mean;
  return e;
}

std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) {
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_value_list(const std::string& text, const char* what) {
  try {
    return parse_tau_grid(text);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"model", c.model},
                     {"graph", c.graph_path},
                     {"lattice", c.lattice},
                     {"J", c.J},
                     {"h", c.h},
                     {"d_tau", c.d_tau},
                     {"taus", c.taus},
                     {"n_traj", c.n_traj},
                     {"seed", c.seed},
                     {"threads", c.threads},
                     {"observables", c.observables},
                     {"error_method", c.error_method},
                     {"e0", c.e0 ? nlohmann::json(*c.e0) : nlohmann::json(nullptr)},
                     {"invalid_tolerance", c.invalid_tolerance},
                     {"csv", c.csv_path},
                     {"manifest", c.manifest_path}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  try {
    j.at("model").get_to(c.model);
    j.at("graph").get_to(c.graph_path);
    j.at("lattice").get_to(c.lattice);
    j.at("J").get_to(c.J);
    j.at("h").get_to(c.h);
    j.at("d_tau").get_to(c.d_tau);
    j.at("taus").get_to(c.taus);
    j.at("n_traj").get_to(c.n_traj);
    j.at("seed").get_to(c.seed);
    j.at("threads").get_to(c.threads);
    j.at("observables").get_to(c.observables);
    j.at("error_method").get_to(c.error_method);
    if (j.at("e0").is_null()) {
      c.e0.reset();
    } else {
      c.e0 = j.at("e0").get<double>();
    }
    j.at("invalid_tolerance").get_to(c.invalid_tolerance);
    j.at("csv").get_to(c.csv_path);
    j.at("manifest").get_to(c.manifest_path);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest config: ") + e.what());
  }
}

std::vector<double> parse_tau_grid(const std::string& text) {
  auto to_double = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (s.empty() || pos != s.size() || !std::isfinite(v)) {
      throw ValidationError("bad number '" + s + "' in grid '" + text + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("grid '" + text + "' must be start:stop:step");
    const double a = to_double(parts[0]), b = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw ValidationError("grid '" + text + "' needs step > 0 and stop >= start");
    const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
    for (long long k = 0; k <= n; ++k) out.push_back(a + static_cast<double>(k) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(to_double(p));
  if (out.empty()) throw ValidationError("empty grid");
  return out;
}

RunResult simulate(const RunConfig& c) {
  validate(c);
  const auto model = build_model(c);
  const auto method = parse_error_method(c.error_method);
  const Schedule schedule = schedule_of(c);
  RunResult result;
  for (const auto& o : c.observables) result.series.emplace(o, ObservableSeries(o));
  result.report = evolve(*model, schedule, [&](const WeightedSnapshot& snap) {
    for (const auto& o : c.observables) {
      Estimate e;
      if (o == "energy" || o == "delta_eps") {
        e = energy_observable(*model, snap, method);
        e.value *= c.J;
        e.stderr_ *= c.J;
        if (o == "delta_eps") {
          e.value = (e.value - *c.e0) / std::abs(*c.e0);
          e.stderr_ /= std::abs(*c.e0);
        }
      } else if (o == "m2") {
        e = magnetization_sq(snap, method);
      } else if (o == "sx") {
        e = transverse_magnetization(snap, method);
      } else {
        e = log_zeta_estimate(snap);
      }
      result.series.at(o).push_back(snap.tau, e);
    }
  });
  return result;
}

std::string run_csv(const RunConfig& c, const RunResult& r) {
  std::ostringstream os;
  os << kRunCsvHeader << '\n';
  const std::size_t rows = r.series.at(c.observables.front()).size();
  for (std::size_t k = 0; k < rows; ++k) {
    for (const auto& o : c.observables) {
      const auto& row = r.series.at(o).rows()[k];
      os << format_number(row.tau) << ',' << o << ',' << format_number(row.value) << ','
         << format_number(row.stderr_) << ',' << format_number(row.ess) << ',' << row.n_traj << '\n';
    }
  }
  return os.str();
}

int cmd_graph(std::size_t n, std::size_t k, std::uint64_t seed, const std::string& out_path, std::ostream& log) {
  const auto g = generate_random_regular(n, k, seed);
  write_graph_file(g, out_path);
  log << "nodes " << g.n() << " edges " << g.edge_count() << '\n';
  return kOk;
}

int cmd_run(const RunConfig& c, std::ostream& log) {
  if (c.csv_path.empty()) throw ValidationError("out: CSV output path required");
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = simulate(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(c.csv_path, run_csv(c, result));

  if (!c.manifest_path.empty()) {
    nlohmann::json m;
    m["tool"] = "itwa-engine";
    m["version"] = kToolVersion;
    m["command"] = "run";
    m["config"] = c;
    m["seed"] = c.seed;
    m["d_tau"] = c.d_tau;
    m["n_traj"] = result.report.n_traj;
    m["invalid_trajectories"] = result.report.n_invalid;
    m["invalid_fraction"] = result.report.invalid_fraction();
    m["wall_time_seconds"] = wall;
    write_text(c.manifest_path, json_text(m));
  }
  log << "snapshots " << c.taus.size() << " trajectories " << result.report.n_traj << " invalid "
      << result.report.n_invalid << '\n';
  if (result.report.invalid_fraction() > c.invalid_tolerance) {
    log << "error: invalid-trajectory fraction " << result.report.invalid_fraction() << " exceeds tolerance "
        << c.invalid_tolerance << '\n';
    return kNumerical;
  }
  if (result.report.n_invalid > 0) log << "warning: " << result.report.n_invalid << " trajectories invalidated\n";
  return kOk;
}

int cmd_oracle(const OracleConfig& c, std::ostream& log) {
  if (c.csv_path.empty()) throw ValidationError("out: CSV output path required");
  if (!(c.J > 0.0)) throw ValidationError("J: must be > 0");
  std::ostringstream os;
  os << kOracleCsvHeader << '\n';
  auto row = [&](double tau, const char* obs, double value, const std::string& method) {
    os << format_number(tau) << ',' << obs << ',' << format_number(value) << ',' << format_number(0.0)
       << ",n/a,n/a," << method << '\n';
  };
  const double inf = std::numeric_limits<double>::infinity();
  if (c.model == "ising-graph") {
    if (c.graph_path.empty()) throw ValidationError("graph: required for model ising-graph");
    const auto g = read_graph_file(c.graph_path);
    if (c.method == "enumeration") {
      const auto spectrum = enumerate_spectrum(g, 1.0);
      for (double tau : c.taus) row(tau, "energy", c.J * thermal_energy(spectrum, tau), "enumeration");
      const auto gs = enumerate_ground_state(g, 1.0);
      row(inf, "ground_energy", c.J * gs.energy, "enumeration");
      log << "ground energy " << c.J * gs.energy << " degeneracy " << gs.degeneracy << '\n';
    } else if (c.method == "annealing") {
      AnnealingOptions opts;
      opts.restarts = c.restarts;
      opts.sweeps = c.sweeps;
      const auto gs = sa_estimate_ground_state(g, 1.0, opts, c.seed);
      row(inf, "ground_energy", c.J * gs.energy, "annealing");
      log << "ground energy (annealing upper bound) " << c.J * gs.energy << '\n';
    } else {
      throw ValidationError("method: expected enumeration or annealing, got '" + c.method + "'");
    }
  } else if (c.model == "tfim") {
    const TFIMModel m(LatticeSpec::parse(c.lattice), 1.0, c.h / c.J);
    const TfimSpectrum spectrum(m);
    for (double tau : c.taus) {
      const auto t = spectrum.thermal(tau);
      row(tau, "energy", c.J * t.energy, "ed");
      row(tau, "m2", t.m_sq, "ed");
    }
    row(inf, "ground_energy", c.J * spectrum.ground_energy(), "ed");
  } else {
    throw ValidationError("model: expected ising-graph or tfim, got '" + c.model + "'");
  }
  write_text(c.csv_path, os.str());
  return kOk;
}

std::vector<SweepPoint> sweep(const SweepConfig& c) {
  if (c.values.empty()) throw ValidationError("values: empty sweep axis");
  if (c.param != "h") throw ValidationError("param: only 'h' is supported");
  if (c.base.model != "tfim") throw ValidationError("sweep: parameter h requires model tfim");
  if (!(c.window_max >= c.window_min)) throw ValidationError("window: max must be >= min");
  if (c.base.taus.empty() || c.window_min < c.base.taus.front() || c.window_max > c.base.taus.back()) {
    throw ValidationError("window: must lie inside the tau grid");
  }
  std::vector<SweepPoint> out;
  for (double v : c.values) {
    if (!std::isfinite(v)) throw ValidationError("values: non-finite entry");
    RunConfig rc = c.base;
    rc.h = v * rc.J;
    rc.observables = {c.observable};
    const auto result = simulate(rc);
    out.push_back({v, window_average(result.series.at(c.observable), c.window_min, c.window_max)});
  }
  return out;
}

int cmd_sweep(const SweepConfig& c, std::ostream& log) {
  if (c.csv_path.empty()) throw ValidationError("out: CSV output path required");
  const auto points = sweep(c);
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& p : points) {
    os << format_number(p.param) << ',' << format_number(p.estimate.value) << ','
       << format_number(p.estimate.stderr_) << '\n';
  }
  write_text(c.csv_path, os.str());
  log << "sweep points " << points.size() << '\n';
  return kOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"itwa-engine: imaginary-time truncated Wigner simulations of spin-1/2 systems"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  // graph
  std::size_t g_n = 0, g_k = 3;
  std::uint64_t g_seed = 1;
  std::string g_out = "graph.txt";
  auto* graph_cmd = app.add_subcommand("graph", "Generate a random k-regular graph");
  graph_cmd->add_option("--n", g_n, "Number of nodes")->required();
  graph_cmd->add_option("--k", g_k, "Degree")->capture_default_str();
  graph_cmd->add_option("--seed", g_seed, "Random seed")->capture_default_str();
  graph_cmd->add_option("--out", g_out, "Output edge-list path")->capture_default_str();

  // shared simulation options
  RunConfig rc;
  std::string taus_text, manifest_in, e0_text, observables_text = "energy";
  auto add_sim_options = [&](CLI::App* cmd) {
    cmd->add_option("--model", rc.model, "ising-graph or tfim")->capture_default_str();
    cmd->add_option("--graph", rc.graph_path, "Graph edge-list file (ising-graph)");
    cmd->add_option("--lattice", rc.lattice, "Lattice, e.g. 8, 4x4, 3x4:open (tfim)")->capture_default_str();
    cmd->add_option("--J", rc.J, "Coupling J > 0")->capture_default_str();
    cmd->add_option("--h", rc.h, "Transverse field (tfim)")->capture_default_str();
    cmd->add_option("--dtau", rc.d_tau, "Step size in units of 1/J")->capture_default_str();
    cmd->add_option("--taus", taus_text, "Snapshot grid start:stop:step or comma list (units 1/J)");
    cmd->add_option("--ntraj", rc.n_traj, "Number of trajectories")->capture_default_str();
    cmd->add_option("--seed", rc.seed, "Random seed")->capture_default_str();
    cmd->add_option("--threads", rc.threads, "Worker threads (0: ITWA_THREADS or all cores)");
    cmd->add_option("--error-method", rc.error_method, "jackknife or bootstrap")->capture_default_str();
    cmd->add_option("--invalid-tolerance", rc.invalid_tolerance, "Max invalid-trajectory fraction")
        ->capture_default_str();
  };

  auto* run_cmd = app.add_subcommand("run", "Integrate an ensemble and write observables");
  add_sim_options(run_cmd);
  run_cmd->add_option("--observables", observables_text, "Comma list: energy,m2,sx,log_zeta,delta_eps")
      ->capture_default_str();
  run_cmd->add_option("--e0", e0_text, "Externally supplied ground-state energy (enables delta_eps)");
  run_cmd->add_option("--out", rc.csv_path, "CSV output path");
  run_cmd->add_option("--manifest", rc.manifest_path, "Manifest output path");
  run_cmd->add_option("--from-manifest", manifest_in, "Re-run the configuration stored in a manifest");

  OracleConfig oc;
  std::string oracle_taus;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact or heuristic reference values");
  oracle_cmd->add_option("--model", oc.model, "ising-graph or tfim")->capture_default_str();
  oracle_cmd->add_option("--graph", oc.graph_path, "Graph edge-list file");
  oracle_cmd->add_option("--lattice", oc.lattice, "Lattice (tfim)")->capture_default_str();
  oracle_cmd->add_option("--J", oc.J, "Coupling J > 0")->capture_default_str();
  oracle_cmd->add_option("--h", oc.h, "Transverse field (tfim)")->capture_default_str();
  oracle_cmd->add_option("--taus", oracle_taus, "Tau grid (units 1/J)");
  oracle_cmd->add_option("--method", oc.method, "enumeration or annealing")->capture_default_str();
  oracle_cmd->add_option("--restarts", oc.restarts, "Annealing restarts")->capture_default_str();
  oracle_cmd->add_option("--sweeps", oc.sweeps, "Annealing sweeps per restart")->capture_default_str();
  oracle_cmd->add_option("--seed", oc.seed, "Annealing seed")->capture_default_str();
  oracle_cmd->add_option("--out", oc.csv_path, "CSV output path")->required();

  SweepConfig sc;
  std::string sweep_values, window_text;
  auto* sweep_cmd = app.add_subcommand("sweep", "Window-averaged observable across a parameter axis");
  add_sim_options(sweep_cmd);
  sweep_cmd->add_option("--param", sc.param, "Swept parameter (h, in units of J)")->capture_default_str();
  sweep_cmd->add_option("--values", sweep_values, "Axis values (comma list or start:stop:step)")->required();
  sweep_cmd->add_option("--window", window_text, "Averaging window tau_min:tau_max (units 1/J)")->required();
  sweep_cmd->add_option("--observable", sc.observable, "Observable to average")->capture_default_str();
  sweep_cmd->add_option("--out", sc.csv_path, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*graph_cmd) return cmd_graph(g_n, g_k, g_seed, g_out, out);

    if (*oracle_cmd) {
      if (!oracle_taus.empty()) oc.taus = parse_value_list(oracle_taus, "taus");
      return cmd_oracle(oc, out);
    }

    auto finish_sim_options = [&](bool need_taus) {
      if (!taus_text.empty()) {
        rc.taus = parse_value_list(taus_text, "taus");
      } else if (need_taus) {
        throw ValidationError("taus: required");
      }
    };

    if (*run_cmd) {
      if (!manifest_in.empty()) {
        std::ifstream in(manifest_in);
        if (!in) throw ValidationError("cannot open manifest '" + manifest_in + "'");
        nlohmann::json m;
        try {
          m = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError("manifest '" + manifest_in + "': " + e.what());
        }
        RunConfig loaded = m.at("config").get<RunConfig>();
        // Output locations may be redirected; everything else comes from the manifest.
        if (!rc.csv_path.empty()) loaded.csv_path = rc.csv_path;
        if (!rc.manifest_path.empty()) loaded.manifest_path = rc.manifest_path;
        return cmd_run(loaded, out);
      }
      finish_sim_options(true);
      rc.observables = parse_list(observables_text);
      if (!e0_text.empty()) rc.e0 = parse_value_list(e0_text, "e0").at(0);
      return cmd_run(rc, out);
    }

    if (*sweep_cmd) {
      finish_sim_options(true);
      sc.base = rc;
      sc.values = parse_value_list(sweep_values, "values");
      const auto w = parse_value_list(window_text.find(':') != std::string::npos
                                          ? window_text.substr(0, window_text.find(':')) + "," +
                                                window_text.substr(window_text.find(':') + 1)
                                          : window_text,
                                      "window");
      if (w.size() != 2) throw ValidationError("window: expected tau_min:tau_max");
      sc.window_min = w[0];
      sc.window_max = w[1];
      return cmd_sweep(sc, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SizeGuardError& e) {
    err << "error: " << e.what() << '\n';
    return kSizeGuard;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace itwa::cli
