#pragma once

#include <cstddef>

// Every threshold used by the operations and the tests lives here so that
// both sides agree on the same numbers.
namespace qhdyn::tol {

inline constexpr std::size_t max_dim = 64;

// linalg
inline constexpr double hermitian_input = 1e-10;      // relative ||A - A^+||_F
inline constexpr double jacobi_offdiag = 1e-12;       // relative off-diagonal mass
inline constexpr int jacobi_max_sweeps = 100;
inline constexpr double pd_eigen_floor = 1e-10;       // lambda_min > floor * lambda_max
inline constexpr double singular_pivot = 1e-14;       // |pivot| < floor * ||A||_F
inline constexpr double max_condition = 1e12;         // pivot-ratio heuristic
inline constexpr double expm_scaled_norm = 0.5;
inline constexpr int expm_taylor_order = 16;

// model
inline constexpr double omega_step = 1e-6;            // central difference for d(omega)/dt
inline constexpr double family_fd_step = 1e-5;        // fallback derivative of an OperatorFamily
inline constexpr double frame_hermitian = 1e-8;       // h(t) Hermiticity check during propagation
inline constexpr double quasi_hermitian_probe = 1e-8;

// invariants / verdict
inline constexpr double time_dependence = 1e-6;       // max_t ||dTheta/dt||_F above this => time-dependent
inline constexpr double unitary_drift = 1e-6;         // max drift at or below => unitary
inline constexpr double observable_defect = 1e-6;     // max defect at or below => observable
inline constexpr double zero_norm = 1e-14;

// cli
inline constexpr std::size_t min_config_steps = 10;

}  // namespace qhdyn::tol
