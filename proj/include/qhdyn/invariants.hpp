#pragma once

// Residuals for the unitarity, intertwining and generalized
// pseudo-Hermiticity identities, and the theorem verdict built on them.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qhdyn/evolution.hpp"

namespace qhdyn {

struct ResidualSeries {
  std::vector<double> times;
  std::vector<double> values;
  double max_value = 0.0;
  double argmax_time = 0.0;

  void push(double t, double v) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::NonFinite, "residual is negative or non-finite at t=" + std::to_string(t));
    if (values.empty() || v > max_value) {
      max_value = v;
      argmax_time = t;
    }
    times.push_back(t);
    values.push_back(v);
  }
};

/// <x, y>_Theta = <x | Theta y>, conjugate-linear in x.
inline Complex physical_inner_product(const ComplexVector& x, const ComplexVector& y, const ComplexMatrix& theta) {
  return x.dot(theta * y);
}

inline double physical_norm_sq(const ComplexVector& x, const ComplexMatrix& theta) {
  return physical_inner_product(x, x, theta).real();
}

/// |<Phi(t),Phi(t)>_Theta(t) - <Phi(t0),Phi(t0)>_Theta(t0)| / <Phi(t0),Phi(t0)>_Theta(t0)
inline ResidualSeries unitarity_drift(const Trajectory& traj, const MetricFamily& metric) {
  if (traj.states.size() != traj.grid.size())
    throw Error(ErrorKind::InvalidArgument, "unitarity_drift: trajectory has no state samples");
  const double norm0 = physical_norm_sq(traj.states[0], metric.theta_at(traj.grid.t0));
  if (!(std::abs(norm0) > tol::zero_norm))
    throw Error(ErrorKind::ZeroInitialNorm, "unitarity_drift: initial physical norm underflows");
  ResidualSeries out;
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const double t = traj.grid.time(k);
    out.push(t, std::abs(physical_norm_sq(traj.states[k], metric.theta_at(t)) - norm0) / norm0);
  }
  return out;
}

/// ||U(t)^+ Theta(t) U(t) - Theta(t0)||_F / ||Theta(t0)||_F
inline ResidualSeries intertwining_residual(const Trajectory& traj, const MetricFamily& metric) {
  if (!traj.has_propagators())
    throw Error(ErrorKind::InvalidArgument, "intertwining_residual: trajectory has no propagator samples");
  const ComplexMatrix theta0 = metric.theta_at(traj.grid.t0);
  const double scale = fro_norm(theta0);
  ResidualSeries out;
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const double t = traj.grid.time(k);
    const ComplexMatrix& u = traj.propagators[k];
    out.push(t, fro_norm(adjoint(u) * metric.theta_at(t) * u - theta0) / scale);
  }
  return out;
}

/// ||H'^+ - Theta H' Theta^-1 - i hbar (dTheta/dt) Theta^-1||_F / max(1, ||H'||_F) at time t.
inline double generalized_ph_residual(const Scenario& scenario, double t, const ComplexMatrix& h_prime) {
  const ComplexMatrix theta = scenario.metric.theta_at(t);
  const ComplexMatrix theta_inv = inverse(theta);
  const ComplexMatrix rhs =
      theta * h_prime * theta_inv + I_unit * scenario.hbar * scenario.metric.theta_dot_at(t) * theta_inv;
  return fro_norm(adjoint(h_prime) - rhs) / std::max(1.0, fro_norm(h_prime));
}

enum class GeneratorSource {
  Formula,     // H' = H - i hbar omega^-1 d(omega)/dt
  Propagator,  // i hbar (dU/dt) U^-1, central difference on the grid
};

inline double generalized_ph_residual(const Scenario& scenario, const Trajectory& traj, std::size_t k,
                                      GeneratorSource source = GeneratorSource::Formula) {
  if (k < 1 || k + 1 > traj.grid.steps)
    throw Error(ErrorKind::InvalidArgument, "generalized_ph_residual: index must be interior");
  const double t = traj.grid.time(k);
  const ComplexMatrix h_prime = source == GeneratorSource::Formula ? effective_hamiltonian(scenario, t)
                                                                   : generator_from_propagator(traj, k);
  return generalized_ph_residual(scenario, t, h_prime);
}

/// H' is an observable iff it is Theta-pseudo-Hermitian.
inline double observability_defect(const ComplexMatrix& h_prime, const ComplexMatrix& theta) {
  return pseudo_hermiticity_residual(h_prime, theta);
}

struct TheoremVerdict {
  bool metric_time_dependent = false;
  double time_dependence_witness = 0.0;  // max_t ||dTheta/dt||_F
  bool evolution_unitary = false;
  double unitarity_witness = 0.0;        // max unitarity drift
  bool generator_observable = false;
  double observability_witness = 0.0;    // max interior observability defect of the generator
  bool consistent_with_theorem = true;
};

/// The generator that actually drives `traj`: extracted from the propagator
/// with fourth-order stencils, or the stored H' samples for covariant runs.
inline std::vector<ComplexMatrix> evolution_generators(const Trajectory& traj) {
  if (traj.has_propagators()) return generator_series(traj);
  if (traj.generators.size() == traj.grid.size()) return traj.generators;
  throw Error(ErrorKind::InvalidArgument, "trajectory carries neither propagators nor generator samples");
}

inline TheoremVerdict theorem_verdict(const Scenario& scenario, const Trajectory& traj) {
  TheoremVerdict v;
  const TimeGrid& grid = traj.grid;
  for (std::size_t k = 0; k < grid.size(); ++k)
    v.time_dependence_witness =
        std::max(v.time_dependence_witness, fro_norm(scenario.metric.theta_dot_at(grid.time(k))));
  v.unitarity_witness = unitarity_drift(traj, scenario.metric).max_value;

  const auto generators = evolution_generators(traj);
  for (std::size_t k = 1; k < grid.steps; ++k)
    v.observability_witness = std::max(
        v.observability_witness, observability_defect(generators[k], scenario.metric.theta_at(grid.time(k))));

  v.metric_time_dependent = v.time_dependence_witness > tol::time_dependence;
  v.evolution_unitary = v.unitarity_witness <= tol::unitary_drift;
  v.generator_observable = v.observability_witness <= tol::observable_defect;
  v.consistent_with_theorem = !(v.metric_time_dependent && v.evolution_unitary && v.generator_observable);
  return v;
}

inline TheoremVerdict theorem_verdict(const Scenario& scenario, EvolutionMode mode) {
  return theorem_verdict(scenario, propagate(scenario, mode));
}

}  // namespace qhdyn
