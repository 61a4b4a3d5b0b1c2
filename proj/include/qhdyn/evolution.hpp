#pragma once

// The three evolution laws on a fixed grid, plus the two routes to the
// effective generator H'.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qhdyn/model.hpp"

namespace qhdyn {

enum class EvolutionMode { Naive, MetricCompatible, Covariant };

inline std::string_view mode_name(EvolutionMode mode) {
  switch (mode) {
    case EvolutionMode::Naive: return "naive";
    case EvolutionMode::MetricCompatible: return "metric_compatible";
    case EvolutionMode::Covariant: return "covariant";
  }
  return "unknown";
}

inline std::optional<EvolutionMode> parse_mode(std::string_view text) {
  for (auto m : {EvolutionMode::Naive, EvolutionMode::MetricCompatible, EvolutionMode::Covariant})
    if (mode_name(m) == text) return m;
  return std::nullopt;
}

struct Trajectory {
  TimeGrid grid;
  EvolutionMode mode = EvolutionMode::Naive;
  double hbar = 1.0;
  std::vector<ComplexMatrix> propagators;  // U(t_k); empty for covariant
  std::vector<ComplexVector> states;       // Phi(t_k)
  std::vector<ComplexMatrix> generators;   // H'(t_k) when computed

  bool has_propagators() const { return propagators.size() == grid.size(); }
};

/// Classical RK4 for i dX/dt = G(t) X on `grid`, returning X(t_k) for every k.
/// `State` is a matrix or a vector; the generator is evaluated once at each
/// grid point and once at each midpoint.
template <class State, class Generator>
std::vector<State> rk4_solve(const Generator& generator_at, const TimeGrid& grid, State initial) {
  grid.validate();
  const double h = grid.dt();
  std::vector<State> out;
  out.reserve(grid.size());
  out.push_back(std::move(initial));

  ComplexMatrix g_now = generator_at(grid.time(0));
  for (std::size_t k = 0; k < grid.steps; ++k) {
    const double t = grid.time(k);
    const ComplexMatrix g_mid = generator_at(t + 0.5 * h);
    const ComplexMatrix g_next = generator_at(grid.time(k + 1));
    const State& x = out.back();

    const State k1 = -I_unit * (g_now * x);
    const State k2 = -I_unit * (g_mid * (x + (0.5 * h) * k1));
    const State k3 = -I_unit * (g_mid * (x + (0.5 * h) * k2));
    const State k4 = -I_unit * (g_next * (x + h * k3));
    State next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(next))
      throw Error(ErrorKind::NonFinite, "rk4: non-finite value at step " + std::to_string(k + 1));
    out.push_back(std::move(next));
    g_now = g_next;
  }
  return out;
}

/// Propagator of i dX/dt = G(t) X with X(t0) = I.
template <class Generator>
std::vector<ComplexMatrix> rk4_matrix_ode(const Generator& generator_at, const TimeGrid& grid) {
  const ComplexMatrix g0 = generator_at(grid.time(0));
  return rk4_solve<ComplexMatrix>(generator_at, grid, identity(g0.rows()));
}

namespace detail {

inline std::vector<ComplexVector> apply_to_state(const std::vector<ComplexMatrix>& props, const ComplexVector& phi0) {
  std::vector<ComplexVector> out;
  out.reserve(props.size());
  for (std::size_t k = 0; k < props.size(); ++k) out.push_back(k == 0 ? phi0 : (props[k] * phi0).eval());
  return out;
}

}  // namespace detail

/// i hbar dU/dt = H(t) U, U(t0) = I; Phi(t) = U(t) Phi(t0).
inline Trajectory propagate_naive(const Scenario& scenario) {
  const double hbar = scenario.hbar;
  Trajectory traj{scenario.grid, EvolutionMode::Naive, hbar, {}, {}, {}};
  traj.propagators = rk4_matrix_ode(
      [&](double t) { return (scenario.hamiltonian.value_at(t) / hbar).eval(); }, scenario.grid);
  traj.states = detail::apply_to_state(traj.propagators, scenario.initial_state);
  return traj;
}

/// h(t) = omega H omega^-1, checked Hermitian and returned symmetrized.
inline ComplexMatrix frame_hamiltonian(const Scenario& scenario, double t) {
  const ComplexMatrix omega = scenario.metric.omega_at(t);
  const ComplexMatrix h = omega * scenario.hamiltonian.value_at(t) * inverse(omega);
  if (hermiticity_defect(h) > tol::frame_hermitian)
    throw Error(ErrorKind::FrameNotHermitian,
                "h(t) = omega H omega^-1 is not Hermitian at t=" + std::to_string(t) +
                    " (is H Theta-pseudo-Hermitian?)");
  return hermitian_part(h);
}

/// U_R(t) = omega(t)^-1 u(t) omega(t0) with i hbar du/dt = h(t) u.
inline Trajectory propagate_metric_compatible(const Scenario& scenario) {
  const double hbar = scenario.hbar;
  const TimeGrid& grid = scenario.grid;
  Trajectory traj{grid, EvolutionMode::MetricCompatible, hbar, {}, {}, {}};
  const auto frame_props =
      rk4_matrix_ode([&](double t) { return (frame_hamiltonian(scenario, t) / hbar).eval(); }, grid);

  const ComplexMatrix omega0 = scenario.metric.omega_at(grid.t0);
  traj.propagators.reserve(frame_props.size());
  traj.propagators.push_back(identity(static_cast<Eigen::Index>(scenario.dim)));
  for (std::size_t k = 1; k < frame_props.size(); ++k)
    traj.propagators.push_back(inverse(scenario.metric.omega_at(grid.time(k))) * frame_props[k] * omega0);
  traj.states = detail::apply_to_state(traj.propagators, scenario.initial_state);
  return traj;
}

/// H'(t) = H(t) - i hbar omega(t)^-1 d(omega)/dt.
inline ComplexMatrix effective_hamiltonian(const Scenario& scenario, double t) {
  const ComplexMatrix omega_inv = inverse(scenario.metric.omega_at(t));
  return scenario.hamiltonian.value_at(t) - I_unit * scenario.hbar * omega_inv * scenario.metric.omega_dot_at(t);
}

/// i hbar D_t Phi = H Phi with D_t = d/dt + omega^-1 d(omega)/dt, integrated
/// directly for the state. The generator samples hold H'(t_k).
inline Trajectory propagate_covariant(const Scenario& scenario) {
  const double hbar = scenario.hbar;
  Trajectory traj{scenario.grid, EvolutionMode::Covariant, hbar, {}, {}, {}};
  traj.states = rk4_solve<ComplexVector>(
      [&](double t) { return (effective_hamiltonian(scenario, t) / hbar).eval(); }, scenario.grid,
      scenario.initial_state);
  traj.generators.reserve(scenario.grid.size());
  for (std::size_t k = 0; k < scenario.grid.size(); ++k)
    traj.generators.push_back(effective_hamiltonian(scenario, scenario.grid.time(k)));
  return traj;
}

inline Trajectory propagate(const Scenario& scenario, EvolutionMode mode) {
  switch (mode) {
    case EvolutionMode::Naive: return propagate_naive(scenario);
    case EvolutionMode::MetricCompatible: return propagate_metric_compatible(scenario);
    case EvolutionMode::Covariant: return propagate_covariant(scenario);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown evolution mode");
}

/// H'(t_k) = i hbar [U(t_{k+1}) - U(t_{k-1})] / (2 dt) U(t_k)^-1, second order.
inline ComplexMatrix generator_from_propagator(const Trajectory& traj, std::size_t k) {
  if (!traj.has_propagators())
    throw Error(ErrorKind::InvalidArgument, "generator_from_propagator: trajectory has no propagator samples");
  if (k < 1 || k + 1 > traj.grid.steps)
    throw Error(ErrorKind::InvalidArgument, "generator_from_propagator: index must be interior");
  const auto& u = traj.propagators;
  const ComplexMatrix du = (u[k + 1] - u[k - 1]) / (2.0 * traj.grid.dt());
  return I_unit * traj.hbar * du * inverse(u[k]);
}

/// i hbar (dU/dt) U^-1 at every grid point using fourth-order five-point
/// stencils (centered in the interior, one-sided near the ends).
inline std::vector<ComplexMatrix> generator_series(const Trajectory& traj) {
  if (!traj.has_propagators())
    throw Error(ErrorKind::InvalidArgument, "generator_series: trajectory has no propagator samples");
  const std::size_t n = traj.grid.steps;
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "generator_series: needs at least 4 steps");
  const auto& u = traj.propagators;
  const double h12 = 12.0 * traj.grid.dt();

  std::vector<ComplexMatrix> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    ComplexMatrix du;
    if (k >= 2 && k + 2 <= n) {
      du = (u[k - 2] - 8.0 * u[k - 1] + 8.0 * u[k + 1] - u[k + 2]) / h12;
    } else if (k == 0) {
      du = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / h12;
    } else if (k == 1) {
      du = (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / h12;
    } else if (k == n - 1) {
      du = (3.0 * u[n] + 10.0 * u[n - 1] - 18.0 * u[n - 2] + 6.0 * u[n - 3] - u[n - 4]) / h12;
    } else {
      du = (25.0 * u[n] - 48.0 * u[n - 1] + 36.0 * u[n - 2] - 16.0 * u[n - 3] + 3.0 * u[n - 4]) / h12;
    }
    out.push_back(I_unit * traj.hbar * du * inverse(u[k]));
  }
  return out;
}

}  // namespace qhdyn
