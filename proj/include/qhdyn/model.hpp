#pragma once

// Time-parametrized operators: generic families, the metric Theta(t) with its
// positive root omega(t), and the quasi-Hermitian Hamiltonian H = omega^-1 h omega.

#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include "qhdyn/grid.hpp"
#include "qhdyn/linalg.hpp"

namespace qhdyn {

using MatrixFunction = std::function<ComplexMatrix(double)>;

/// t -> A(t) with an optional analytic derivative.
struct OperatorFamily {
  std::size_t dim = 0;
  MatrixFunction value;
  MatrixFunction derivative;  // empty => central difference

  ComplexMatrix value_at(double t) const {
    ComplexMatrix a = value(t);
    if (static_cast<std::size_t>(a.rows()) != dim || a.rows() != a.cols())
      throw Error(ErrorKind::InvalidArgument, "operator family returned a matrix of the wrong size");
    return a;
  }

  ComplexMatrix derivative_at(double t) const {
    if (derivative) return derivative(t);
    const double d = tol::family_fd_step;
    return (value_at(t + d) - value_at(t - d)) / (2.0 * d);
  }

  bool has_analytic_derivative() const { return static_cast<bool>(derivative); }
};

inline OperatorFamily constant_family(const ComplexMatrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  return {n, [a](double) { return a; },
          [n](double) { return ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).eval(); }};
}

/// Metric Theta(t) plus the memoized positive root omega(t) = Theta(t)^{1/2}.
///
/// Copies share one cache; the cache takes a shared lock for lookups and an
/// exclusive lock for inserts, so a MetricFamily may be used from several
/// threads at once.
class MetricFamily {
 public:
  MetricFamily() = default;

  explicit MetricFamily(OperatorFamily theta, MatrixFunction analytic_omega_dot = {},
                        double omega_step = tol::omega_step)
      : theta_(std::move(theta)),
        omega_dot_(std::move(analytic_omega_dot)),
        omega_step_(omega_step),
        cache_(std::make_shared<Cache>()) {}

  std::size_t dim() const { return theta_.dim; }
  const OperatorFamily& theta() const { return theta_; }
  double omega_step() const { return omega_step_; }
  bool has_analytic_omega_dot() const { return static_cast<bool>(omega_dot_); }

  ComplexMatrix theta_at(double t) const { return theta_.value_at(t); }
  ComplexMatrix theta_dot_at(double t) const { return theta_.derivative_at(t); }

  ComplexMatrix omega_at(double t) const {
    const auto key = std::bit_cast<std::uint64_t>(t);
    {
      std::shared_lock lock(cache_->mutex);
      if (auto it = cache_->entries.find(key); it != cache_->entries.end()) return it->second;
    }
    ComplexMatrix root = sqrt_pd(theta_at(t));
    std::unique_lock lock(cache_->mutex);
    if (cache_->entries.size() >= kCacheLimit) cache_->entries.clear();
    return cache_->entries.try_emplace(key, std::move(root)).first->second;
  }

  ComplexMatrix omega_dot_at(double t) const {
    if (omega_dot_) return omega_dot_(t);
    return omega_dot_difference(t, omega_step_);
  }

  ComplexMatrix omega_dot_difference(double t, double step) const {
    return (omega_at(t + step) - omega_at(t - step)) / (2.0 * step);
  }

  std::size_t cached_roots() const {
    std::shared_lock lock(cache_->mutex);
    return cache_->entries.size();
  }

 private:
  static constexpr std::size_t kCacheLimit = 1u << 14;

  struct Cache {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::uint64_t, ComplexMatrix> entries;
  };

  OperatorFamily theta_;
  MatrixFunction omega_dot_;
  double omega_step_ = tol::omega_step;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

inline ComplexMatrix omega_of(const MetricFamily& metric, double t) { return metric.omega_at(t); }

inline ComplexMatrix omega_dot_of(const MetricFamily& metric, double t) { return metric.omega_dot_at(t); }

/// ||A^+ - Theta A Theta^-1||_F / max(1, ||A||_F)
inline double pseudo_hermiticity_residual(const ComplexMatrix& a, const ComplexMatrix& theta) {
  return fro_norm(adjoint(a) - theta * a * inverse(theta)) / std::max(1.0, fro_norm(a));
}

/// H(t) = omega(t)^-1 h(t) omega(t). The derivative is analytic whenever the
/// frame family provides one; omega-dot comes from the metric.
inline OperatorFamily build_quasi_hermitian(const OperatorFamily& h_frame, const MetricFamily& metric) {
  if (h_frame.dim != metric.dim())
    throw Error(ErrorKind::InvalidArgument, "build_quasi_hermitian: frame and metric dimensions differ");

  auto checked_frame = [h_frame](double t) {
    ComplexMatrix h = h_frame.value_at(t);
    if (fro_norm(h - adjoint(h)) > tol::hermitian_input * std::max(1.0, fro_norm(h)))
      throw Error(ErrorKind::NotHermitian, "frame Hamiltonian h(t) is not Hermitian at t=" + std::to_string(t));
    return h;
  };

  OperatorFamily out;
  out.dim = h_frame.dim;
  out.value = [metric, checked_frame](double t) {
    const ComplexMatrix omega = metric.omega_at(t);
    return (inverse(omega) * checked_frame(t) * omega).eval();
  };
  out.derivative = [metric, checked_frame, h_frame](double t) {
    const ComplexMatrix omega = metric.omega_at(t);
    const ComplexMatrix omega_inv = inverse(omega);
    const ComplexMatrix omega_dot = metric.omega_dot_at(t);
    const ComplexMatrix h = checked_frame(t);
    const ComplexMatrix h_dot = h_frame.derivative_at(t);
    return (omega_inv * h_dot * omega + omega_inv * h * omega_dot - omega_inv * omega_dot * omega_inv * h * omega)
        .eval();
  };
  return out;
}

/// An assembled, immutable system ready for propagation.
struct Scenario {
  std::string name;
  std::size_t dim = 0;
  double hbar = 1.0;
  OperatorFamily frame;        // h(t), Hermitian
  OperatorFamily hamiltonian;  // H(t), Theta-pseudo-Hermitian
  MetricFamily metric;
  ComplexVector initial_state;
  TimeGrid grid;
  bool naive_contrast = false;
};

}  // namespace qhdyn
