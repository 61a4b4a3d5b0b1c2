#pragma once

// Batch orchestration behind the command-line verbs: run, sweep, verify.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "qhdyn/cli/config.hpp"
#include "qhdyn/invariants.hpp"
#include "qhdyn/version.hpp"

namespace qhdyn {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int operational_error = 1;
inline constexpr int verdict_inconsistent = 2;
}  // namespace exit_code

struct ModeReport {
  EvolutionMode mode = EvolutionMode::Naive;
  ComplexVector terminal_state;
  double max_unitarity_drift = 0.0;
  std::optional<double> max_intertwining_residual;  // absent for covariant runs
  double max_generalized_ph_residual = 0.0;
  TheoremVerdict verdict;
};

struct RunReport {
  ScenarioSpec scenario;
  std::uint64_t seed = 0;
  std::vector<ModeReport> modes;
  double runtime_ms = 0.0;

  bool all_consistent() const {
    for (const auto& m : modes)
      if (!m.verdict.consistent_with_theorem) return false;
    return true;
  }

  int exit_code() const { return all_consistent() ? exit_code::ok : exit_code::verdict_inconsistent; }
};

/// Everything computed for one (scenario, mode) pair.
struct ModeAnalysis {
  Trajectory trajectory;
  ResidualSeries drift;
  std::optional<ResidualSeries> intertwining;
  std::vector<double> generalized_ph;  // every grid point, using the evolution's own generator
  ModeReport report;
};

inline ModeAnalysis analyze_mode(const Scenario& scenario, EvolutionMode mode) {
  ModeAnalysis a{propagate(scenario, mode), {}, std::nullopt, {}, {}};
  const Trajectory& traj = a.trajectory;
  a.drift = unitarity_drift(traj, scenario.metric);
  if (traj.has_propagators()) a.intertwining = intertwining_residual(traj, scenario.metric);

  const auto generators = evolution_generators(traj);
  double max_interior = 0.0;
  a.generalized_ph.reserve(traj.grid.size());
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const double r = generalized_ph_residual(scenario, traj.grid.time(k), generators[k]);
    a.generalized_ph.push_back(r);
    if (k >= 1 && k < traj.grid.steps) max_interior = std::max(max_interior, r);
  }

  a.report.mode = mode;
  a.report.terminal_state = traj.states.back();
  a.report.max_unitarity_drift = a.drift.max_value;
  if (a.intertwining) a.report.max_intertwining_residual = a.intertwining->max_value;
  a.report.max_generalized_ph_residual = max_interior;
  a.report.verdict = theorem_verdict(scenario, traj);
  return a;
}

inline Json to_json(const TheoremVerdict& v) {
  return Json{{"metric_time_dependent", v.metric_time_dependent},
              {"time_dependence_witness", v.time_dependence_witness},
              {"evolution_unitary", v.evolution_unitary},
              {"unitarity_witness", v.unitarity_witness},
              {"generator_observable", v.generator_observable},
              {"observability_witness", v.observability_witness},
              {"consistent_with_theorem", v.consistent_with_theorem}};
}

inline Json to_json(const ModeReport& m) {
  Json state = Json::array();
  for (Eigen::Index i = 0; i < m.terminal_state.size(); ++i)
    state.push_back(Json::array({m.terminal_state(i).real(), m.terminal_state(i).imag()}));
  Json j{{"mode", std::string(mode_name(m.mode))},
         {"terminal_state", std::move(state)},
         {"max_unitarity_drift", m.max_unitarity_drift}};
  j["max_intertwining_residual"] = m.max_intertwining_residual ? Json(*m.max_intertwining_residual) : Json(nullptr);
  j["max_generalized_ph_residual"] = m.max_generalized_ph_residual;
  j["verdict"] = to_json(m.verdict);
  return j;
}

inline Json to_json(const RunReport& r, bool include_runtime = true) {
  Json modes = Json::array();
  for (const auto& m : r.modes) modes.push_back(to_json(m));
  Json j{{"schema_version", kSchemaVersion},
         {"tool_version", kVersion},
         {"seed", r.seed},
         {"scenario", to_json(r.scenario)},
         {"modes", std::move(modes)},
         {"all_consistent", r.all_consistent()}};
  if (include_runtime) j["runtime_ms"] = r.runtime_ms;
  return j;
}

namespace runner_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "'");
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace runner_detail

/// t, re_i/im_i per state component, physical_norm, unitarity_drift,
/// intertwining_residual (empty without propagators), generalized_ph_residual.
inline void write_mode_csv(const std::filesystem::path& path, const Scenario& scenario, const ModeAnalysis& a) {
  using runner_detail::num;
  auto out = runner_detail::open_out(path);
  out << "t";
  for (std::size_t i = 0; i < scenario.dim; ++i) out << ",re_" << i << ",im_" << i;
  out << ",physical_norm,unitarity_drift,intertwining_residual,generalized_ph_residual\n";
  const auto& traj = a.trajectory;
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const double t = traj.grid.time(k);
    const ComplexVector& phi = traj.states[k];
    out << num(t);
    for (Eigen::Index i = 0; i < phi.size(); ++i) out << ',' << num(phi(i).real()) << ',' << num(phi(i).imag());
    out << ',' << num(physical_norm_sq(phi, scenario.metric.theta_at(t))) << ',' << num(a.drift.values[k]) << ',';
    if (a.intertwining) out << num(a.intertwining->values[k]);
    out << ',' << num(a.generalized_ph[k]) << '\n';
  }
}

/// Runs every requested mode and writes the requested outputs.
inline RunReport run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  const ScenarioSpec spec = resolve_scenario(config);
  const Scenario scenario = build_scenario(spec);

  const std::filesystem::path dir(config.output_dir);
  if (config.emit_csv || config.emit_json) runner_detail::ensure_dir(dir);

  RunReport report;
  report.scenario = spec;
  report.seed = config.seed;
  for (EvolutionMode mode : config.modes) {
    ModeAnalysis a = analyze_mode(scenario, mode);
    if (config.emit_csv)
      write_mode_csv(dir / (spec.name + "_" + std::string(mode_name(mode)) + ".csv"), scenario, a);
    report.modes.push_back(std::move(a.report));
  }
  report.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (config.emit_json) runner_detail::open_out(dir / (spec.name + "_report.json")) << to_json(report).dump(2) << '\n';
  return report;
}

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<RunReport> reports;
};

/// One run per value, each writing into its own subdirectory; the combined
/// CSV (value, mode, max drift, observability defect) is written afterwards.
inline SweepResult sweep(const RunConfig& base, const std::string& parameter, const std::vector<double>& values) {
  {
    RunConfig probe = base;
    probe.params[parameter] = 0.0;
    (void)resolve_scenario(probe);  // UnknownParameter surfaces before any work
  }
  SweepResult result{parameter, values, {}};
  const std::filesystem::path dir(base.output_dir);

  std::vector<std::future<RunReport>> jobs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunConfig cfg = base;
    cfg.params[parameter] = values[i];
    cfg.output_dir = (dir / ("sweep_" + parameter) / std::to_string(i)).string();
    jobs.push_back(std::async(std::launch::async, [cfg] { return run(cfg); }));
  }
  for (auto& job : jobs) result.reports.push_back(job.get());

  if (!values.empty() && base.emit_csv) {
    runner_detail::ensure_dir(dir);
    auto out = runner_detail::open_out(dir / ("sweep_" + parameter + ".csv"));
    out << "value,mode,max_unitarity_drift,observability_defect\n";
    for (std::size_t i = 0; i < values.size(); ++i)
      for (const auto& m : result.reports[i].modes)
        out << runner_detail::num(values[i]) << ',' << mode_name(m.mode) << ','
            << runner_detail::num(m.max_unitarity_drift) << ','
            << runner_detail::num(m.verdict.observability_witness) << '\n';
  }
  return result;
}

struct VerifyCheck {
  std::string scenario;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerdictRow {
  std::string scenario;
  EvolutionMode mode = EvolutionMode::Naive;
  TheoremVerdict verdict;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::size_t random_count = 0;
  std::vector<VerifyCheck> checks;
  std::vector<VerdictRow> verdicts;

  bool all_checks_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  bool all_consistent() const {
    for (const auto& v : verdicts)
      if (!v.verdict.consistent_with_theorem) return false;
    return true;
  }

  std::size_t forbidden_count() const {
    std::size_t n = 0;
    for (const auto& v : verdicts) n += v.verdict.consistent_with_theorem ? 0 : 1;
    return n;
  }

  int exit_code() const {
    return all_checks_pass() && all_consistent() ? exit_code::ok : exit_code::verdict_inconsistent;
  }
};

/// Spectral condition number of a Hermitian positive-definite matrix.
inline double spd_condition(const ComplexMatrix& a) {
  const auto eig = hermitian_eig(a);
  return eig.eigenvalues.maxCoeff() / eig.eigenvalues.minCoeff();
}

/// The built-in invariant suite: per-scenario identity checks, plus theorem
/// verdicts over the built-ins and `random_count` seeded random scenarios.
inline VerifyReport verify(std::uint64_t seed = 1, std::size_t random_count = 50) {
  VerifyReport report;
  report.seed = seed;
  report.random_count = random_count;
  auto check = [&](const std::string& scenario, const std::string& name, double value, double threshold) {
    report.checks.push_back({scenario, name, value, threshold, value <= threshold});
  };

  for (const Scenario& s : builtin_scenarios()) {
    const ModeAnalysis naive = analyze_mode(s, EvolutionMode::Naive);
    const ModeAnalysis mc = analyze_mode(s, EvolutionMode::MetricCompatible);
    const Trajectory cov = propagate_covariant(s);

    check(s.name, "metric_compatible unitarity drift", mc.drift.max_value, 1e-8);
    check(s.name, "metric_compatible intertwining residual", mc.intertwining->max_value, 1e-7);

    double gen_gap = 0.0, gph = 0.0;
    for (std::size_t k = 1; k < s.grid.steps; ++k) {
      const double t = s.grid.time(k);
      const ComplexMatrix formula = effective_hamiltonian(s, t);
      gen_gap = std::max(gen_gap, fro_norm(generator_from_propagator(mc.trajectory, k) - formula));
      gph = std::max(gph, generalized_ph_residual(s, t, formula));
    }
    check(s.name, "formula vs propagator generator", gen_gap, 5e-4);
    check(s.name, "generalized pseudo-Hermiticity of H'", gph, 1e-6);
    check(s.name, "covariant vs metric_compatible terminal state",
          (cov.states.back() - mc.trajectory.states.back()).norm(), 1e-7);

    const double kappa = spd_condition(s.metric.theta_at(s.grid.t0));
    for (const ModeAnalysis* a : {&naive, &mc})
      check(s.name, std::string(mode_name(a->trajectory.mode)) + " drift minus kappa*intertwining",
            std::max(0.0, a->drift.max_value - kappa * a->intertwining->max_value), 1e-12);

    report.verdicts.push_back({s.name, EvolutionMode::Naive, naive.report.verdict});
    report.verdicts.push_back({s.name, EvolutionMode::MetricCompatible, mc.report.verdict});
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) {
    const std::size_t dim = 2 + i % 7;
    const Scenario s = build_scenario(random_scenario_spec(rng, dim, "RANDOM_" + std::to_string(i)));
    for (EvolutionMode mode : {EvolutionMode::Naive, EvolutionMode::MetricCompatible})
      report.verdicts.push_back({s.name, mode, theorem_verdict(s, mode)});
  }
  return report;
}

inline Json to_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"scenario", c.scenario}, {"check", c.name}, {"value", c.value},
                          {"threshold", c.threshold}, {"pass", c.pass}});
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back(Json{{"scenario", v.scenario}, {"mode", std::string(mode_name(v.mode))},
                            {"verdict", to_json(v.verdict)}});
  return Json{{"schema_version", kSchemaVersion},
              {"tool_version", kVersion},
              {"seed", r.seed},
              {"random_count", r.random_count},
              {"checks", std::move(checks)},
              {"verdicts", std::move(verdicts)},
              {"forbidden_verdicts", r.forbidden_count()},
              {"passed", r.exit_code() == exit_code::ok}};
}

}  // namespace qhdyn
