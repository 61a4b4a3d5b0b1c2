#pragma once

// Serializable scenario descriptions and the built-in systems.
//
// Operator families are closures and cannot be written to disk, so a
// scenario is described by named builders with parameters (ScenarioSpec) and
// assembled into a Scenario on demand.

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qhdyn/model.hpp"

namespace qhdyn {

using MatrixLiteral = std::vector<std::vector<Complex>>;

/// Theta constant.
struct ConstantMetric {
  MatrixLiteral theta;
  bool operator==(const ConstantMetric&) const = default;
};

/// Theta(t) = diag(1, e^{2 alpha t}, e^{4 alpha t}, ...).
struct DiagGrowthMetric {
  double alpha = 0.5;
  bool operator==(const DiagGrowthMetric&) const = default;
};

/// Theta(t) = R(t) diag(1, mu) R(t)^T with R(t) the plane rotation by beta t (dim 2).
struct RotatingMetric {
  double mu = 3.0;
  double beta = 1.0;
  bool operator==(const RotatingMetric&) const = default;
};

/// Theta(t) = B(t)^+ B(t) + I with B(t) = sum_k coeffs[k] t^k.
struct PolynomialMetric {
  std::vector<MatrixLiteral> coeffs;
  bool operator==(const PolynomialMetric&) const = default;
};

using MetricSpec = std::variant<ConstantMetric, DiagGrowthMetric, RotatingMetric, PolynomialMetric>;

/// h(t) = sum_k coeffs[k] t^k, every coefficient Hermitian. A single
/// coefficient is a constant frame Hamiltonian.
struct FrameSpec {
  std::vector<MatrixLiteral> coeffs;
  bool operator==(const FrameSpec&) const = default;
};

struct ScenarioSpec {
  std::string name;
  std::size_t dim = 2;
  double hbar = 1.0;
  MetricSpec metric;
  FrameSpec frame;
  std::optional<std::vector<Complex>> initial_state;  // default: ones, unit physical norm at t0
  TimeGrid grid;
  bool naive_contrast = false;

  bool operator==(const ScenarioSpec&) const = default;
};

inline ComplexMatrix to_matrix(const MatrixLiteral& lit, std::size_t dim, const std::string& what) {
  if (lit.size() != dim)
    throw Error(ErrorKind::ValidationError, what + ": expected " + std::to_string(dim) + " rows");
  ComplexMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    if (lit[i].size() != dim)
      throw Error(ErrorKind::ValidationError, what + ": row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < dim; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lit[i][j];
  }
  if (!all_finite(out)) throw Error(ErrorKind::ValidationError, what + ": non-finite entry");
  return out;
}

inline MatrixLiteral to_literal(const ComplexMatrix& m) {
  MatrixLiteral out(static_cast<std::size_t>(m.rows()), std::vector<Complex>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

namespace pauli {
inline ComplexMatrix x() { return (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline ComplexMatrix y() { return (ComplexMatrix(2, 2) << 0, -I_unit, I_unit, 0).finished(); }
inline ComplexMatrix z() { return (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished(); }
}  // namespace pauli

namespace detail {

inline ComplexMatrix rotation(double angle) {
  return (ComplexMatrix(2, 2) << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle)).finished();
}

inline ComplexMatrix rotation_dot(double angle, double rate) {
  return (rate * (ComplexMatrix(2, 2) << -std::sin(angle), -std::cos(angle), std::cos(angle), -std::sin(angle)).finished())
      .eval();
}

inline std::vector<ComplexMatrix> to_matrices(const std::vector<MatrixLiteral>& lits, std::size_t dim,
                                              const std::string& what) {
  if (lits.empty()) throw Error(ErrorKind::ValidationError, what + ": at least one coefficient required");
  std::vector<ComplexMatrix> out;
  out.reserve(lits.size());
  for (std::size_t k = 0; k < lits.size(); ++k)
    out.push_back(to_matrix(lits[k], dim, what + "[" + std::to_string(k) + "]"));
  return out;
}

inline ComplexMatrix poly_value(const std::vector<ComplexMatrix>& c, double t) {
  ComplexMatrix acc = c.back();
  for (std::size_t k = c.size() - 1; k-- > 0;) acc = (acc * t + c[k]).eval();
  return acc;
}

inline ComplexMatrix poly_derivative(const std::vector<ComplexMatrix>& c, double t) {
  ComplexMatrix acc = ComplexMatrix::Zero(c[0].rows(), c[0].cols());
  for (std::size_t k = c.size(); k-- > 1;) acc = (acc * t + static_cast<double>(k) * c[k]).eval();
  return acc;
}

struct MetricVisitor {
  std::size_t dim;

  MetricFamily operator()(const ConstantMetric& m) const {
    const ComplexMatrix theta = to_matrix(m.theta, dim, "metric.theta");
    const auto n = static_cast<Eigen::Index>(dim);
    return MetricFamily(constant_family(theta), [n](double) { return ComplexMatrix::Zero(n, n).eval(); });
  }

  MetricFamily operator()(const DiagGrowthMetric& m) const {
    const auto n = static_cast<Eigen::Index>(dim);
    const double alpha = m.alpha;
    if (!std::isfinite(alpha)) throw Error(ErrorKind::ValidationError, "metric.alpha must be finite");
    OperatorFamily theta{dim,
                         [n, alpha](double t) {
                           ComplexMatrix out = ComplexMatrix::Zero(n, n);
                           for (Eigen::Index k = 0; k < n; ++k) out(k, k) = std::exp(2.0 * k * alpha * t);
                           return out;
                         },
                         [n, alpha](double t) {
                           ComplexMatrix out = ComplexMatrix::Zero(n, n);
                           for (Eigen::Index k = 0; k < n; ++k)
                             out(k, k) = 2.0 * k * alpha * std::exp(2.0 * k * alpha * t);
                           return out;
                         }};
    auto omega_dot = [n, alpha](double t) {
      ComplexMatrix out = ComplexMatrix::Zero(n, n);
      for (Eigen::Index k = 0; k < n; ++k) out(k, k) = static_cast<double>(k) * alpha * std::exp(k * alpha * t);
      return out;
    };
    return MetricFamily(std::move(theta), omega_dot);
  }

  MetricFamily operator()(const RotatingMetric& m) const {
    if (dim != 2) throw Error(ErrorKind::ValidationError, "rotating metric requires dim = 2");
    if (!(m.mu > 0.0) || !std::isfinite(m.mu) || !std::isfinite(m.beta))
      throw Error(ErrorKind::ValidationError, "rotating metric requires finite mu > 0 and finite beta");
    const ComplexMatrix d = (ComplexMatrix(2, 2) << 1, 0, 0, m.mu).finished();
    const double beta = m.beta;
    OperatorFamily theta{2,
                         [d, beta](double t) {
                           const ComplexMatrix r = rotation(beta * t);
                           return (r * d * r.transpose()).eval();
                         },
                         [d, beta](double t) {
                           const ComplexMatrix r = rotation(beta * t);
                           const ComplexMatrix rd = rotation_dot(beta * t, beta);
                           return (rd * d * r.transpose() + r * d * rd.transpose()).eval();
                         }};
    return MetricFamily(std::move(theta));
  }

  MetricFamily operator()(const PolynomialMetric& m) const {
    const auto b = to_matrices(m.coeffs, dim, "metric.coeffs");
    const auto n = static_cast<Eigen::Index>(dim);
    OperatorFamily theta{dim,
                         [b, n](double t) {
                           const ComplexMatrix bt = poly_value(b, t);
                           return (adjoint(bt) * bt + identity(n)).eval();
                         },
                         [b](double t) {
                           const ComplexMatrix bt = poly_value(b, t);
                           const ComplexMatrix bd = poly_derivative(b, t);
                           return (adjoint(bd) * bt + adjoint(bt) * bd).eval();
                         }};
    return MetricFamily(std::move(theta));
  }
};

}  // namespace detail

inline OperatorFamily build_frame(const FrameSpec& spec, std::size_t dim) {
  const auto c = detail::to_matrices(spec.coeffs, dim, "frame.coeffs");
  for (std::size_t k = 0; k < c.size(); ++k)
    if (fro_norm(c[k] - adjoint(c[k])) > tol::hermitian_input * std::max(1.0, fro_norm(c[k])))
      throw Error(ErrorKind::NotHermitian, "frame.coeffs[" + std::to_string(k) + "] is not Hermitian");
  return {dim, [c](double t) { return detail::poly_value(c, t); },
          [c](double t) { return detail::poly_derivative(c, t); }};
}

inline MetricFamily build_metric(const MetricSpec& spec, std::size_t dim) {
  return std::visit(detail::MetricVisitor{dim}, spec);
}

inline Scenario build_scenario(const ScenarioSpec& spec) {
  if (spec.dim < 1 || spec.dim > tol::max_dim)
    throw Error(ErrorKind::ValidationError, "dim must satisfy 1 <= dim <= 64");
  if (!(spec.hbar > 0.0) || !std::isfinite(spec.hbar))
    throw Error(ErrorKind::ValidationError, "hbar must be a positive finite number");
  try {
    spec.grid.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, e.what());
  }

  Scenario s;
  s.name = spec.name;
  s.dim = spec.dim;
  s.hbar = spec.hbar;
  s.grid = spec.grid;
  s.naive_contrast = spec.naive_contrast;
  s.metric = build_metric(spec.metric, spec.dim);
  s.frame = build_frame(spec.frame, spec.dim);
  s.hamiltonian = build_quasi_hermitian(s.frame, s.metric);

  const auto n = static_cast<Eigen::Index>(spec.dim);
  const ComplexMatrix theta0 = s.metric.theta_at(spec.grid.t0);
  (void)s.metric.omega_at(spec.grid.t0);  // NotPositiveDefinite surfaces here, before any norm is taken
  if (spec.initial_state) {
    if (spec.initial_state->size() != spec.dim)
      throw Error(ErrorKind::ValidationError, "initial_state length must equal dim");
    s.initial_state = Eigen::Map<const ComplexVector>(spec.initial_state->data(), n);
    if (!all_finite(s.initial_state)) throw Error(ErrorKind::ValidationError, "initial_state must be finite");
  } else {
    const ComplexVector ones = ComplexVector::Ones(n);
    s.initial_state = ones / std::sqrt(ones.dot(theta0 * ones).real());
  }
  if (!(s.initial_state.dot(theta0 * s.initial_state).real() > tol::zero_norm))
    throw Error(ErrorKind::ValidationError, "initial_state must have nonzero physical norm");

  const double defect = pseudo_hermiticity_residual(s.hamiltonian.value_at(spec.grid.t0), theta0);
  if (defect > tol::quasi_hermitian_probe)
    throw Error(ErrorKind::ValidationError, "hamiltonian is not Theta-pseudo-Hermitian at t0");
  return s;
}

inline ScenarioSpec const_metric_spec() {
  ScenarioSpec s;
  s.name = "CONST_METRIC";
  s.metric = ConstantMetric{to_literal((ComplexMatrix(2, 2) << 1, 0, 0, 4).finished())};
  s.frame = FrameSpec{{to_literal(pauli::x())}};
  return s;
}

inline ScenarioSpec diag_growth_spec(double alpha = 0.5) {
  ScenarioSpec s;
  s.name = "DIAG_GROWTH";
  s.metric = DiagGrowthMetric{alpha};
  s.frame = FrameSpec{{to_literal(pauli::x())}};
  return s;
}

inline ScenarioSpec rotating_spec(double mu = 3.0, double beta = 1.0) {
  ScenarioSpec s;
  s.name = "ROTATING";
  s.metric = RotatingMetric{mu, beta};
  s.frame = FrameSpec{{to_literal(pauli::z())}};
  return s;
}

inline ScenarioSpec naive_contrast_spec(double alpha = 0.5) {
  ScenarioSpec s = diag_growth_spec(alpha);
  s.name = "NAIVE_CONTRAST";
  s.naive_contrast = true;
  return s;
}

inline std::vector<ScenarioSpec> builtin_specs() {
  return {const_metric_spec(), diag_growth_spec(), rotating_spec(), naive_contrast_spec()};
}

inline std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const auto& spec : builtin_specs()) out.push_back(build_scenario(spec));
  return out;
}

inline std::optional<ScenarioSpec> find_builtin(const std::string& name) {
  for (auto& spec : builtin_specs())
    if (spec.name == name) return spec;
  return std::nullopt;
}

/// Random Hermitian frame Hamiltonian and a quadratic metric factor
/// B(t) = B0 + B1 t + B2 t^2. Fully determined by the engine state.
inline ScenarioSpec random_scenario_spec(std::mt19937_64& rng, std::size_t dim, const std::string& name = "RANDOM") {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  auto random_matrix = [&](double s) {
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double re = normal(rng);
        const double im = normal(rng);
        m(i, j) = s * Complex(re, im);
      }
    return m;
  };

  ScenarioSpec s;
  s.name = name;
  s.dim = dim;
  s.frame = FrameSpec{{to_literal(hermitian_part(random_matrix(scale)))}};
  s.metric = PolynomialMetric{{to_literal(random_matrix(scale)), to_literal(random_matrix(0.5 * scale)),
                               to_literal(random_matrix(0.5 * scale))}};
  return s;
}

/// Named scalar parameters: hbar, t0, t1, alpha (DiagGrowthMetric), mu and beta (RotatingMetric).
inline void set_parameter(ScenarioSpec& spec, const std::string& name, double value) {
  if (name == "hbar") {
    spec.hbar = value;
    return;
  }
  if (name == "t0") {
    spec.grid.t0 = value;
    return;
  }
  if (name == "t1") {
    spec.grid.t1 = value;
    return;
  }
  if (auto* diag = std::get_if<DiagGrowthMetric>(&spec.metric); diag && name == "alpha") {
    diag->alpha = value;
    return;
  }
  if (auto* rot = std::get_if<RotatingMetric>(&spec.metric)) {
    if (name == "mu") {
      rot->mu = value;
      return;
    }
    if (name == "beta") {
      rot->beta = value;
      return;
    }
  }
  throw Error(ErrorKind::UnknownParameter, "scenario '" + spec.name + "' has no parameter '" + name + "'");
}

}  // namespace qhdyn
