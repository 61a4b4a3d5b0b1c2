// qhdyn: batch front-end for the time-dependent metric engine.
//
//   qhdyn run --config cfg.json [--mode naive ...] [--out dir] [--emit csv,json]
//   qhdyn sweep --config cfg.json --param alpha --values 0.25,0.5,1.0
//   qhdyn list-scenarios
//   qhdyn verify [--seed 1] [--random 50] [--json report.json]
//
// Exit codes: 0 success, 1 operational error, 2 theorem-verdict inconsistency.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qhdyn/cli/runner.hpp"

namespace {

void print_mode(const qhdyn::ModeReport& m) {
  const auto& v = m.verdict;
  char inter[32] = "n/a";
  if (m.max_intertwining_residual) std::snprintf(inter, sizeof inter, "%.3e", *m.max_intertwining_residual);
  std::printf("  %-18s drift=%.3e  intertwining=%s  gen_ph=%.3e  verdict(td=%d unitary=%d observable=%d) %s\n",
              std::string(qhdyn::mode_name(m.mode)).c_str(), m.max_unitarity_drift,
              inter,
              m.max_generalized_ph_residual, v.metric_time_dependent, v.evolution_unitary, v.generator_observable,
              v.consistent_with_theorem ? "consistent" : "INCONSISTENT");
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void apply_overrides(qhdyn::RunConfig& cfg, const std::vector<std::string>& modes, const std::string& out,
                     const std::string& emit) {
  using qhdyn::Error;
  using qhdyn::ErrorKind;
  if (!modes.empty()) {
    cfg.modes.clear();
    for (const auto& group : modes)
      for (const auto& name : split_csv(group)) {
        const auto m = qhdyn::parse_mode(name);
        if (!m) throw Error(ErrorKind::ValidationError, "unknown mode '" + name + "'");
        cfg.modes.push_back(*m);
      }
  }
  if (!out.empty()) cfg.output_dir = out;
  if (!emit.empty()) {
    cfg.emit_csv = cfg.emit_json = false;
    for (const auto& e : split_csv(emit)) {
      if (e == "csv") {
        cfg.emit_csv = true;
      } else if (e == "json") {
        cfg.emit_json = true;
      } else {
        throw Error(ErrorKind::ValidationError, "unknown emit format '" + e + "'");
      }
    }
  }
  qhdyn::validate(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Hermitian dynamics with time-dependent metric operators"};
  app.set_version_flag("--version", qhdyn::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, emit, param, values_text, json_path;
  std::vector<std::string> modes;
  std::uint64_t seed = 1;
  std::size_t random_count = 50;

  auto* run_cmd = app.add_subcommand("run", "Propagate one scenario and write CSV/JSON outputs");
  run_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  run_cmd->add_option("--mode", modes, "naive, metric_compatible, covariant (repeatable or comma-separated)");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--emit", emit, "comma-separated subset of csv,json");

  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat a run over values of one scenario parameter");
  sweep_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  sweep_cmd->add_option("--param", param, "parameter name (alpha, mu, beta, hbar, t0, t1)")->required();
  sweep_cmd->add_option("--values", values_text, "comma-separated values")->required();
  sweep_cmd->add_option("--out", out_dir, "output directory");

  auto* list_cmd = app.add_subcommand("list-scenarios", "List the built-in scenarios");

  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in invariant suite and theorem verdicts");
  verify_cmd->add_option("--seed", seed, "seed for the random scenarios");
  verify_cmd->add_option("--random", random_count, "number of random scenarios");
  verify_cmd->add_option("--json", json_path, "write the verification report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qhdyn::exit_code::operational_error;
  }

  try {
    if (*run_cmd) {
      auto cfg = qhdyn::load_config(config_path);
      apply_overrides(cfg, modes, out_dir, emit);
      const auto report = qhdyn::run(cfg);
      std::printf("%s (%zu modes, %.1f ms)\n", report.scenario.name.c_str(), report.modes.size(), report.runtime_ms);
      for (const auto& m : report.modes) print_mode(m);
      return report.exit_code();
    }
    if (*sweep_cmd) {
      auto cfg = qhdyn::load_config(config_path);
      apply_overrides(cfg, {}, out_dir, "");
      std::vector<double> values;
      for (const auto& v : split_csv(values_text)) {
        try {
          std::size_t used = 0;
          values.push_back(std::stod(v, &used));
          if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
          throw qhdyn::Error(qhdyn::ErrorKind::ParseError, "--values: '" + v + "' is not a number");
        }
      }
      const auto result = qhdyn::sweep(cfg, param, values);
      int code = qhdyn::exit_code::ok;
      for (std::size_t i = 0; i < result.reports.size(); ++i) {
        std::printf("%s = %g\n", param.c_str(), values[i]);
        for (const auto& m : result.reports[i].modes) print_mode(m);
        if (result.reports[i].exit_code() != qhdyn::exit_code::ok) code = qhdyn::exit_code::verdict_inconsistent;
      }
      return code;
    }
    if (*list_cmd) {
      for (const auto& spec : qhdyn::builtin_specs()) {
        std::printf("%-15s dim=%zu grid=(%g, %g, %zu)  metric=%s%s\n", spec.name.c_str(), spec.dim, spec.grid.t0,
                    spec.grid.t1, spec.grid.steps, qhdyn::to_json(spec.metric).dump().c_str(),
                    spec.naive_contrast ? "  [naive contrast]" : "");
      }
      std::printf("%-15s dim=params.dim (default 2), generated from the config seed\n", "RANDOM");
      return qhdyn::exit_code::ok;
    }
    if (*verify_cmd) {
      const auto report = qhdyn::verify(seed, random_count);
      for (const auto& c : report.checks)
        std::printf("[%s] %-15s %-48s %.3e <= %.1e\n", c.pass ? "PASS" : "FAIL", c.scenario.c_str(), c.name.c_str(),
                    c.value, c.threshold);
      std::printf("verdicts: %zu evaluated, %zu with (time-dependent, unitary, observable) all true\n",
                  report.verdicts.size(), report.forbidden_count());
      if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw qhdyn::Error(qhdyn::ErrorKind::Io, "cannot write '" + json_path + "'");
        out << qhdyn::to_json(report).dump(2) << '\n';
      }
      return report.exit_code();
    }
  } catch (const qhdyn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qhdyn::exit_code::operational_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qhdyn::exit_code::operational_error;
  }
  return qhdyn::exit_code::operational_error;
}
