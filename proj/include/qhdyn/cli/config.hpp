#pragma once

// Run configuration: JSON schema, parsing with diagnostics, and the inverse
// serializer.
//
//   {
//     "schema_version": 1,                       optional, must be 1
//     "scenario": "DIAG_GROWTH" | { inline },    required
//     "params": { "alpha": 0.7 },                optional named scalars
//     "modes": ["naive", "metric_compatible", "covariant"],
//     "grid": { "t0": 0, "t1": 1, "steps": 1000 },
//     "output_dir": "out",
//     "emit": ["csv", "json"],
//     "seed": 0
//   }
//
// Inline scenarios:
//
//   { "name": "...", "dim": 2, "hbar": 1,
//     "metric": { "kind": "constant", "theta": M }
//             | { "kind": "diag_growth", "alpha": a }
//             | { "kind": "rotating", "mu": m, "beta": b }
//             | { "kind": "polynomial", "coeffs": [M0, M1, ...] },
//     "frame": { "coeffs": [H0, H1, ...] },
//     "initial_state": [[re, im], ...],
//     "grid": {...}, "naive_contrast": false }
//
// Matrices M are nested arrays of [re, im] pairs, row-major.

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qhdyn/evolution.hpp"
#include "qhdyn/scenarios.hpp"

namespace qhdyn {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::variant<std::string, ScenarioSpec> scenario;  // built-in name or inline definition
  std::map<std::string, double> params{};
  std::vector<EvolutionMode> modes{EvolutionMode::Naive, EvolutionMode::MetricCompatible,
                                   EvolutionMode::Covariant};
  std::optional<TimeGrid> grid{};
  std::string output_dir = ".";
  bool emit_csv = true;
  bool emit_json = true;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
};

namespace config_detail {

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::ParseError, "field '" + field + "': " + msg);
}

[[noreturn]] inline void invalid(const std::string& rule) { throw Error(ErrorKind::ValidationError, rule); }

inline void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid("unknown key '" + key + "' in " + where);
  }
}

inline const Json& require_object(const Json& j, const std::string& field) {
  if (!j.is_object()) parse_fail(field, "expected an object");
  return j;
}

inline double get_number(const Json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, "expected a number");
  return j.get<double>();
}

inline std::string get_string(const Json& j, const std::string& field) {
  if (!j.is_string()) parse_fail(field, "expected a string");
  return j.get<std::string>();
}

inline std::uint64_t get_unsigned(const Json& j, const std::string& field) {
  if (!j.is_number_unsigned()) parse_fail(field, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline Complex get_complex(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    parse_fail(field, "expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Complex> get_complex_vector(const Json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected an array of [re, im] pairs");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_complex(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline MatrixLiteral get_matrix(const Json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected a matrix (array of rows)");
  MatrixLiteral out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_complex_vector(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<MatrixLiteral> get_matrices(const Json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected an array of matrices");
  std::vector<MatrixLiteral> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_matrix(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline TimeGrid parse_grid(const Json& j, const std::string& field, TimeGrid grid = {}) {
  require_object(j, field);
  reject_unknown(j, field, {"t0", "t1", "steps"});
  if (j.contains("t0")) grid.t0 = get_number(j["t0"], field + ".t0");
  if (j.contains("t1")) grid.t1 = get_number(j["t1"], field + ".t1");
  if (j.contains("steps")) grid.steps = static_cast<std::size_t>(get_unsigned(j["steps"], field + ".steps"));
  return grid;
}

inline MetricSpec parse_metric(const Json& j) {
  require_object(j, "scenario.metric");
  if (!j.contains("kind")) parse_fail("scenario.metric.kind", "missing");
  const std::string kind = get_string(j["kind"], "scenario.metric.kind");
  if (kind == "constant") {
    reject_unknown(j, "scenario.metric", {"kind", "theta"});
    if (!j.contains("theta")) parse_fail("scenario.metric.theta", "missing");
    return ConstantMetric{get_matrix(j["theta"], "scenario.metric.theta")};
  }
  if (kind == "diag_growth") {
    reject_unknown(j, "scenario.metric", {"kind", "alpha"});
    DiagGrowthMetric m;
    if (j.contains("alpha")) m.alpha = get_number(j["alpha"], "scenario.metric.alpha");
    return m;
  }
  if (kind == "rotating") {
    reject_unknown(j, "scenario.metric", {"kind", "mu", "beta"});
    RotatingMetric m;
    if (j.contains("mu")) m.mu = get_number(j["mu"], "scenario.metric.mu");
    if (j.contains("beta")) m.beta = get_number(j["beta"], "scenario.metric.beta");
    return m;
  }
  if (kind == "polynomial") {
    reject_unknown(j, "scenario.metric", {"kind", "coeffs"});
    if (!j.contains("coeffs")) parse_fail("scenario.metric.coeffs", "missing");
    return PolynomialMetric{get_matrices(j["coeffs"], "scenario.metric.coeffs")};
  }
  parse_fail("scenario.metric.kind", "unknown metric kind '" + kind + "'");
}

inline ScenarioSpec parse_inline_scenario(const Json& j) {
  require_object(j, "scenario");
  reject_unknown(j, "scenario", {"name", "dim", "hbar", "metric", "frame", "initial_state", "grid", "naive_contrast"});
  ScenarioSpec s;
  s.name = j.contains("name") ? get_string(j["name"], "scenario.name") : "INLINE";
  if (!j.contains("dim")) parse_fail("scenario.dim", "missing");
  s.dim = static_cast<std::size_t>(get_unsigned(j["dim"], "scenario.dim"));
  if (j.contains("hbar")) s.hbar = get_number(j["hbar"], "scenario.hbar");
  if (!j.contains("metric")) parse_fail("scenario.metric", "missing");
  s.metric = parse_metric(j["metric"]);
  if (!j.contains("frame")) parse_fail("scenario.frame", "missing");
  const Json& frame = require_object(j["frame"], "scenario.frame");
  reject_unknown(frame, "scenario.frame", {"coeffs"});
  if (!frame.contains("coeffs")) parse_fail("scenario.frame.coeffs", "missing");
  s.frame.coeffs = get_matrices(frame["coeffs"], "scenario.frame.coeffs");
  if (j.contains("initial_state")) s.initial_state = get_complex_vector(j["initial_state"], "scenario.initial_state");
  if (j.contains("grid")) s.grid = parse_grid(j["grid"], "scenario.grid");
  if (j.contains("naive_contrast")) {
    if (!j["naive_contrast"].is_boolean()) parse_fail("scenario.naive_contrast", "expected a boolean");
    s.naive_contrast = j["naive_contrast"].get<bool>();
  }
  return s;
}

inline std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_json(const MatrixLiteral& m) {
  Json rows = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& z : row) r.push_back(complex_json(z));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Json matrices_json(const std::vector<MatrixLiteral>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(matrix_json(m));
  return out;
}

}  // namespace config_detail

inline Json to_json(const TimeGrid& g) { return Json{{"t0", g.t0}, {"t1", g.t1}, {"steps", g.steps}}; }

inline Json to_json(const MetricSpec& metric) {
  using namespace config_detail;
  return std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantMetric>) return Json{{"kind", "constant"}, {"theta", matrix_json(m.theta)}};
        if constexpr (std::is_same_v<T, DiagGrowthMetric>) return Json{{"kind", "diag_growth"}, {"alpha", m.alpha}};
        if constexpr (std::is_same_v<T, RotatingMetric>) return Json{{"kind", "rotating"}, {"mu", m.mu}, {"beta", m.beta}};
        if constexpr (std::is_same_v<T, PolynomialMetric>)
          return Json{{"kind", "polynomial"}, {"coeffs", matrices_json(m.coeffs)}};
      },
      metric);
}

inline Json to_json(const ScenarioSpec& s) {
  using namespace config_detail;
  Json j{{"name", s.name}, {"dim", s.dim}, {"hbar", s.hbar}, {"metric", to_json(s.metric)},
         {"frame", Json{{"coeffs", matrices_json(s.frame.coeffs)}}}};
  if (s.initial_state) {
    Json v = Json::array();
    for (const auto& z : *s.initial_state) v.push_back(complex_json(z));
    j["initial_state"] = std::move(v);
  }
  j["grid"] = to_json(s.grid);
  j["naive_contrast"] = s.naive_contrast;
  return j;
}

inline Json to_json(const RunConfig& c) {
  Json j{{"schema_version", kSchemaVersion}};
  if (const auto* name = std::get_if<std::string>(&c.scenario)) {
    j["scenario"] = *name;
  } else {
    j["scenario"] = to_json(std::get<ScenarioSpec>(c.scenario));
  }
  if (!c.params.empty()) {
    Json p = Json::object();
    for (const auto& [k, v] : c.params) p[k] = v;
    j["params"] = std::move(p);
  }
  Json modes = Json::array();
  for (auto m : c.modes) modes.push_back(std::string(mode_name(m)));
  j["modes"] = std::move(modes);
  if (c.grid) j["grid"] = to_json(*c.grid);
  j["output_dir"] = c.output_dir;
  Json emit = Json::array();
  if (c.emit_csv) emit.push_back("csv");
  if (c.emit_json) emit.push_back("json");
  j["emit"] = std::move(emit);
  j["seed"] = c.seed;
  return j;
}

inline void validate(const RunConfig& c) {
  using config_detail::invalid;
  if (c.modes.empty()) invalid("modes must be nonempty");
  if (c.grid) {
    if (c.grid->steps < tol::min_config_steps) invalid("steps >= 10");
    if (!(c.grid->t1 > c.grid->t0)) invalid("grid requires t1 > t0");
  }
  if (const auto* spec = std::get_if<ScenarioSpec>(&c.scenario)) {
    if (spec->dim < 1 || spec->dim > tol::max_dim) invalid("dim must satisfy 1 <= dim <= 64");
    if (spec->grid.steps < tol::min_config_steps) invalid("steps >= 10");
  } else if (std::get<std::string>(c.scenario).empty()) {
    invalid("scenario name must be nonempty");
  }
  if (c.output_dir.empty()) invalid("output_dir must be nonempty");
  for (const auto& [k, v] : c.params)
    if (!std::isfinite(v)) invalid("param '" + k + "' must be finite");
}

/// Parses and validates a configuration from JSON text.
inline RunConfig parse_config(const std::string& text) {
  using namespace config_detail;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "malformed JSON at " + locate(text, e.byte) + ": " + e.what());
  }
  require_object(j, "<root>");
  reject_unknown(j, "config", {"schema_version", "scenario", "params", "modes", "grid", "output_dir", "emit", "seed"});

  RunConfig c;
  if (j.contains("schema_version") && get_unsigned(j["schema_version"], "schema_version") != kSchemaVersion)
    invalid("schema_version must be 1");
  if (!j.contains("scenario")) parse_fail("scenario", "missing");
  if (j["scenario"].is_string()) {
    c.scenario = j["scenario"].get<std::string>();
  } else {
    c.scenario = parse_inline_scenario(j["scenario"]);
  }
  if (j.contains("params")) {
    require_object(j["params"], "params");
    for (const auto& [k, v] : j["params"].items()) c.params[k] = get_number(v, "params." + k);
  }
  if (j.contains("modes")) {
    if (!j["modes"].is_array()) parse_fail("modes", "expected an array of strings");
    c.modes.clear();
    std::set<EvolutionMode> seen;
    for (std::size_t i = 0; i < j["modes"].size(); ++i) {
      const std::string field = "modes[" + std::to_string(i) + "]";
      const std::string name = get_string(j["modes"][i], field);
      const auto mode = parse_mode(name);
      if (!mode) invalid(field + ": unknown mode '" + name + "'");
      if (seen.insert(*mode).second) c.modes.push_back(*mode);
    }
  }
  if (j.contains("grid")) c.grid = parse_grid(j["grid"], "grid");
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("emit")) {
    if (!j["emit"].is_array()) parse_fail("emit", "expected an array of strings");
    c.emit_csv = c.emit_json = false;
    for (std::size_t i = 0; i < j["emit"].size(); ++i) {
      const std::string what = get_string(j["emit"][i], "emit[" + std::to_string(i) + "]");
      if (what == "csv") {
        c.emit_csv = true;
      } else if (what == "json") {
        c.emit_json = true;
      } else {
        invalid("emit[" + std::to_string(i) + "]: unknown format '" + what + "'");
      }
    }
  }
  if (j.contains("seed")) c.seed = get_unsigned(j["seed"], "seed");
  validate(c);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2); }

/// Resolves the configured scenario to a concrete description: built-in
/// lookup (or RANDOM from the seed), named parameter overrides, grid override.
inline ScenarioSpec resolve_scenario(const RunConfig& c) {
  ScenarioSpec spec;
  std::map<std::string, double> params = c.params;
  if (const auto* name = std::get_if<std::string>(&c.scenario)) {
    if (*name == "RANDOM") {
      std::size_t dim = 2;
      if (auto it = params.find("dim"); it != params.end()) {
        if (!(it->second >= 1.0 && it->second <= static_cast<double>(tol::max_dim)) || it->second != std::floor(it->second))
          throw Error(ErrorKind::ValidationError, "RANDOM: dim must be an integer in [1, 64]");
        dim = static_cast<std::size_t>(it->second);
        params.erase(it);
      }
      std::mt19937_64 rng(c.seed);
      spec = random_scenario_spec(rng, dim);
    } else if (auto found = find_builtin(*name)) {
      spec = *found;
    } else {
      throw Error(ErrorKind::NotFound, "no built-in scenario named '" + *name + "'");
    }
  } else {
    spec = std::get<ScenarioSpec>(c.scenario);
  }
  for (const auto& [k, v] : params) set_parameter(spec, k, v);
  if (c.grid) spec.grid = *c.grid;
  return spec;
}

}  // namespace qhdyn
