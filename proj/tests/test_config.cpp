#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "qhdyn/cli/config.hpp"

using namespace qhdyn;

namespace {

ErrorKind kind_of(const std::string& text, std::string* message = nullptr) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("config was accepted: " << text);
  return ErrorKind::InvalidArgument;
}

const char* kInline = R"({
  "schema_version": 1,
  "scenario": {
    "name": "INLINE",
    "dim": 2,
    "hbar": 0.5,
    "metric": { "kind": "constant", "theta": [[[2, 0], [0, 1]], [[0, -1], [3, 0]]] },
    "frame": { "coeffs": [[[[1, 0], [0.25, -0.5]], [[0.25, 0.5], [-1, 0]]],
                          [[[0, 0], [0, 0.1]], [[0, -0.1], [0.3, 0]]]] },
    "initial_state": [[1, 0], [0, 1]],
    "grid": { "t0": 0, "t1": 0.5, "steps": 200 }
  },
  "params": { "hbar": 0.75 },
  "modes": ["covariant", "naive"],
  "output_dir": "inline_out",
  "emit": ["json"],
  "seed": 17
})";

}  // namespace

TEST_CASE("minimal config fills every default", "[config]") {
  const RunConfig c = parse_config(R"({"scenario": "DIAG_GROWTH"})");
  CHECK(std::get<std::string>(c.scenario) == "DIAG_GROWTH");
  CHECK(c.params.empty());
  CHECK(c.modes == std::vector<EvolutionMode>{EvolutionMode::Naive, EvolutionMode::MetricCompatible,
                                              EvolutionMode::Covariant});
  CHECK_FALSE(c.grid.has_value());
  CHECK(c.output_dir == ".");
  CHECK(c.emit_csv);
  CHECK(c.emit_json);
  CHECK(c.seed == 0);
  CHECK(c == RunConfig{.scenario = std::string("DIAG_GROWTH")});

  const ScenarioSpec spec = resolve_scenario(c);
  CHECK(spec == diag_growth_spec());
}

TEST_CASE("steps below 10 is a validation error", "[config]") {
  std::string msg;
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "grid": {"t0": 0, "t1": 1, "steps": 5}})", &msg) ==
        ErrorKind::ValidationError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("steps >= 10"));
  CHECK_NOTHROW(parse_config(R"({"scenario": "CONST_METRIC", "grid": {"t0": 0, "t1": 1, "steps": 10}})"));
}

TEST_CASE("inline scenario round-trips through serialize and parse", "[config]") {
  const RunConfig c = parse_config(kInline);
  const auto& spec = std::get<ScenarioSpec>(c.scenario);
  CHECK(spec.name == "INLINE");
  CHECK(spec.hbar == 0.5);
  CHECK(spec.frame.coeffs.size() == 2);
  CHECK(std::get<ConstantMetric>(spec.metric).theta[1][0] == Complex(0.0, -1.0));
  CHECK(c.modes == std::vector<EvolutionMode>{EvolutionMode::Covariant, EvolutionMode::Naive});
  CHECK_FALSE(c.emit_csv);
  CHECK(c.seed == 17);

  const std::string text = serialize_config(c);
  const RunConfig again = parse_config(text);
  CHECK(again == c);
  CHECK(serialize_config(again) == text);
}

TEST_CASE("builtin and random configs round-trip", "[config]") {
  RunConfig c{.scenario = std::string("RANDOM")};
  c.params = {{"dim", 4.0}, {"t1", 0.7}};
  c.grid = TimeGrid{0.0, 0.7, 70};
  c.modes = {EvolutionMode::MetricCompatible};
  c.seed = 123456789;
  c.output_dir = "some/dir";
  CHECK(parse_config(serialize_config(c)) == c);

  for (const auto& spec : builtin_specs()) {
    RunConfig inl{.scenario = spec};
    CHECK(parse_config(serialize_config(inl)) == inl);
  }
}

TEST_CASE("resolve_scenario", "[config]") {
  RunConfig c{.scenario = std::string("DIAG_GROWTH")};
  c.params = {{"alpha", 0.25}, {"hbar", 2.0}};
  c.grid = TimeGrid{0.0, 2.0, 500};
  const ScenarioSpec spec = resolve_scenario(c);
  CHECK(std::get<DiagGrowthMetric>(spec.metric).alpha == 0.25);
  CHECK(spec.hbar == 2.0);
  CHECK(spec.grid == TimeGrid{0.0, 2.0, 500});

  RunConfig random{.scenario = std::string("RANDOM")};
  random.params = {{"dim", 5.0}};
  random.seed = 3;
  CHECK(resolve_scenario(random).dim == 5);
  CHECK(resolve_scenario(random) == resolve_scenario(random));
  random.params["dim"] = 2.5;
  CHECK_THROWS_AS(resolve_scenario(random), Error);

  try {
    (void)resolve_scenario(RunConfig{.scenario = std::string("NO_SUCH")});
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFound);
  }

  RunConfig bad{.scenario = std::string("CONST_METRIC")};
  bad.params = {{"alpha", 1.0}};
  try {
    (void)resolve_scenario(bad);
    FAIL("expected UnknownParameter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownParameter);
  }
}

TEST_CASE("unknown keys are rejected", "[config]") {
  std::string msg;
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "steps": 100})", &msg) == ErrorKind::ValidationError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("steps"));
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "grid": {"t0": 0, "t1": 1, "step": 100}})") ==
        ErrorKind::ValidationError);
  CHECK(kind_of(R"({"scenario": {"name": "X", "dim": 2, "colour": 1,
                   "metric": {"kind": "diag_growth"}, "frame": {"coeffs": []}}})") == ErrorKind::ValidationError);
}

TEST_CASE("malformed JSON reports line and column", "[config]") {
  std::string msg;
  CHECK(kind_of("{\n  \"scenario\": \"CONST_METRIC\",\n  \"modes\": [\"naive\",]\n}", &msg) == ErrorKind::ParseError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("line 3"));
  CHECK(kind_of("") == ErrorKind::ParseError);
  CHECK(kind_of("[1, 2]") == ErrorKind::ParseError);
}

TEST_CASE("field-level errors name the field", "[config]") {
  std::string msg;
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "seed": -1})", &msg) == ErrorKind::ParseError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("seed"));
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "modes": ["naive", "sideways"]})", &msg) ==
        ErrorKind::ValidationError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("sideways"));
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "modes": []})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "emit": ["xml"]})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "output_dir": ""})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "grid": {"t0": 1, "t1": 0.5}})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"scenario": "CONST_METRIC", "schema_version": 2})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"modes": ["naive"]})", &msg) == ErrorKind::ParseError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("scenario"));
  CHECK(kind_of(R"({"scenario": {"name": "X", "dim": 2, "metric": {"kind": "spiral"}, "frame": {"coeffs": []}}})",
                &msg) == ErrorKind::ParseError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("spiral"));
  CHECK(kind_of(R"({"scenario": {"name": "X", "dim": 2, "metric": {"kind": "constant", "theta": [[[1, 0, 0]]]},
                   "frame": {"coeffs": []}}})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"scenario": {"name": "X", "dim": 99, "metric": {"kind": "diag_growth"},
                   "frame": {"coeffs": []}}})") == ErrorKind::ValidationError);
}

TEST_CASE("load_config reads files and reports missing ones", "[config]") {
  const auto path = std::filesystem::temp_directory_path() / "qhdyn_test_config.json";
  {
    std::ofstream out(path);
    out << kInline;
  }
  CHECK(load_config(path.string()) == parse_config(kInline));
  std::filesystem::remove(path);
  try {
    (void)load_config(path.string());
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
