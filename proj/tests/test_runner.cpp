#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qhdyn/cli/runner.hpp"

using namespace qhdyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qhdyn_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

RunConfig config_for(const std::string& scenario, const fs::path& out) {
  RunConfig c{.scenario = scenario};
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST_CASE("run CONST_METRIC in every mode", "[runner]") {
  const fs::path out = scratch("const");
  const RunReport r = run(config_for("CONST_METRIC", out));
  REQUIRE(r.modes.size() == 3);
  for (const auto& m : r.modes) {
    INFO(mode_name(m.mode));
    CHECK(m.max_unitarity_drift <= 1e-8);
    CHECK(m.verdict.consistent_with_theorem);
    CHECK_FALSE(m.verdict.metric_time_dependent);
    CHECK(m.max_generalized_ph_residual <= 1e-6);
    CHECK(m.max_intertwining_residual.has_value() == (m.mode != EvolutionMode::Covariant));
  }
  CHECK(r.exit_code() == exit_code::ok);
  for (const char* f : {"CONST_METRIC_naive.csv", "CONST_METRIC_metric_compatible.csv", "CONST_METRIC_covariant.csv",
                        "CONST_METRIC_report.json"})
    CHECK(fs::exists(out / f));
}

TEST_CASE("run DIAG_GROWTH naive flags non-unitary evolution", "[runner]") {
  const fs::path out = scratch("diag");
  RunConfig c = config_for("DIAG_GROWTH", out);
  c.modes = {EvolutionMode::Naive};
  const RunReport r = run(c);
  REQUIRE(r.modes.size() == 1);
  CHECK_FALSE(r.modes[0].verdict.evolution_unitary);
  CHECK(r.modes[0].max_unitarity_drift >= 1e-3);
  CHECK(r.modes[0].verdict.consistent_with_theorem);
  CHECK(r.exit_code() == exit_code::ok);
}

TEST_CASE("run with an unknown scenario raises NotFound", "[runner]") {
  try {
    (void)run(config_for("NOT_A_SCENARIO", scratch("missing")));
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFound);
  }
}

TEST_CASE("run report exit code follows the verdicts", "[runner]") {
  RunReport r;
  r.modes.resize(2);
  CHECK(r.exit_code() == exit_code::ok);
  r.modes[1].verdict.consistent_with_theorem = false;
  CHECK(r.exit_code() == exit_code::verdict_inconsistent);
}

TEST_CASE("CSV layout", "[runner]") {
  const fs::path out = scratch("csv");
  RunConfig c = config_for("ROTATING", out);
  c.grid = TimeGrid{0.0, 1.0, 250};
  c.emit_json = false;
  (void)run(c);
  CHECK_FALSE(fs::exists(out / "ROTATING_report.json"));
  for (const char* mode : {"naive", "metric_compatible", "covariant"}) {
    const auto rows = lines(out / ("ROTATING_" + std::string(mode) + ".csv"));
    REQUIRE(rows.size() == 1 + 251);
    CHECK(rows[0] ==
          "t,re_0,im_0,re_1,im_1,physical_norm,unitarity_drift,intertwining_residual,generalized_ph_residual");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(rows.back().rfind("1,", 0) == 0);
    const auto commas = std::count(rows[5].begin(), rows[5].end(), ',');
    CHECK(commas == 8);
    const bool empty_intertwining = rows[5].find(",,") != std::string::npos;
    CHECK(empty_intertwining == (std::string(mode) == "covariant"));
  }
}

TEST_CASE("JSON report", "[runner]") {
  const fs::path out = scratch("json");
  RunConfig c = config_for("DIAG_GROWTH", out);
  c.emit_csv = false;
  const RunReport r = run(c);
  const Json j = Json::parse(slurp(out / "DIAG_GROWTH_report.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(j["tool_version"] == kVersion);
  CHECK(j["scenario"]["name"] == "DIAG_GROWTH");
  CHECK(j["modes"].size() == 3);
  CHECK(j["all_consistent"] == true);
  CHECK(j.contains("runtime_ms"));
  CHECK(j["modes"][2]["max_intertwining_residual"].is_null());
  CHECK_FALSE(to_json(r, false).contains("runtime_ms"));
  CHECK_FALSE(fs::exists(out / "DIAG_GROWTH_naive.csv"));
}

TEST_CASE("repeated runs give bit-identical JSON", "[runner]") {
  RunConfig c = config_for("RANDOM", scratch("determinism"));
  c.params = {{"dim", 4.0}};
  c.seed = 77;
  c.emit_csv = c.emit_json = false;
  const std::string first = to_json(run(c), false).dump();
  const std::string second = to_json(run(c), false).dump();
  CHECK(first == second);
  c.seed = 78;
  CHECK(to_json(run(c), false).dump() != first);
}

TEST_CASE("sweep over alpha", "[runner]") {
  const fs::path out = scratch("sweep");
  RunConfig base = config_for("DIAG_GROWTH", out);
  base.modes = {EvolutionMode::MetricCompatible};

  const SweepResult zero = sweep(base, "alpha", {0.0});
  REQUIRE(zero.reports.size() == 1);
  CHECK(zero.reports[0].modes[0].verdict.observability_witness <= 1e-8);
  CHECK_FALSE(zero.reports[0].modes[0].verdict.metric_time_dependent);

  const SweepResult r = sweep(base, "alpha", {0.25, 0.5, 1.0});
  REQUIRE(r.reports.size() == 3);
  std::vector<double> defect;
  for (const auto& rep : r.reports) defect.push_back(rep.modes[0].verdict.observability_witness);
  CHECK(defect[0] < defect[1]);
  CHECK(defect[1] < defect[2]);

  const auto rows = lines(out / "sweep_alpha.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "value,mode,max_unitarity_drift,observability_defect");
  CHECK(rows[1].rfind("0.25,metric_compatible,", 0) == 0);
  for (int i = 0; i < 3; ++i) CHECK(fs::exists(out / "sweep_alpha" / std::to_string(i) / "DIAG_GROWTH_report.json"));

  CHECK(sweep(base, "alpha", {}).reports.empty());
  try {
    (void)sweep(base, "gamma", {1.0});
    FAIL("expected UnknownParameter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownParameter);
  }
}

TEST_CASE("verify passes with no forbidden verdicts", "[runner]") {
  const VerifyReport r = verify(1, 10);
  for (const auto& c : r.checks) {
    INFO(c.scenario << ": " << c.name << " = " << c.value);
    CHECK(c.pass);
  }
  CHECK(r.verdicts.size() == 4 * 2 + 10 * 2);
  CHECK(r.forbidden_count() == 0);
  CHECK(r.exit_code() == exit_code::ok);
  const Json j = to_json(r);
  CHECK(j["passed"] == true);
  CHECK(j["forbidden_verdicts"] == 0);
}
