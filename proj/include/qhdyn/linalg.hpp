#pragma once

// Dense complex kernel. Eigen supplies storage and arithmetic; the
// eigensolver, inverse and exponential are implemented here.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "qhdyn/errors.hpp"
#include "qhdyn/tolerances.hpp"

namespace qhdyn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex I_unit{0.0, 1.0};

struct HermitianEig {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns
};

inline double fro_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

inline bool all_finite(const ComplexMatrix& a) {
  return std::all_of(a.data(), a.data() + a.size(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

inline bool all_finite(const ComplexVector& v) {
  return std::all_of(v.data(), v.data() + v.size(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

/// Throws InvalidArgument unless `a` is a square, finite matrix within the size ceiling.
inline void require_operator(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1 || static_cast<std::size_t>(a.rows()) > tol::max_dim)
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": expected square matrix with 1 <= n <= 64, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  if (!all_finite(a)) throw Error(ErrorKind::NonFinite, std::string(what) + ": non-finite entry");
}

/// ||A - A^+||_F / max(1, ||A||_F)
inline double hermiticity_defect(const ComplexMatrix& a) {
  return fro_norm(a - adjoint(a)) / std::max(1.0, fro_norm(a));
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + adjoint(a)); }

/// Cyclic complex Jacobi rotations. Each rotation J = D R D^+ where D carries
/// the phase of a_pq and R is the real rotation that annihilates |a_pq|.
inline HermitianEig hermitian_eig(const ComplexMatrix& input) {
  require_operator(input, "hermitian_eig");
  const double scale = fro_norm(input);
  if (fro_norm(input - adjoint(input)) > tol::hermitian_input * scale)
    throw Error(ErrorKind::NotHermitian, "hermitian_eig: input is not Hermitian");

  const Eigen::Index n = input.rows();
  ComplexMatrix a = hermitian_part(input);
  ComplexMatrix v = identity(n);

  auto off_mass = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * std::norm(a(p, q));
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_mass() > tol::jacobi_offdiag * scale) {
    if (sweep++ >= tol::jacobi_max_sweeps)
      throw Error(ErrorKind::NoConvergence, "hermitian_eig: sweep budget exhausted");
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        const Complex phase = a(p, q) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex jpp = c, jqq = c;
        const Complex jpq = s * phase;
        const Complex jqp = -s * std::conj(phase);

        // A <- A J
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        // A <- J^+ A
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        // V <- V J
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

  HermitianEig out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Unique Hermitian positive-definite square root.
inline ComplexMatrix sqrt_pd(const ComplexMatrix& a) {
  const HermitianEig eig = hermitian_eig(a);
  const double lo = eig.eigenvalues.minCoeff();
  const double hi = eig.eigenvalues.maxCoeff();
  if (!(hi > 0.0) || !(lo > tol::pd_eigen_floor * hi))
    throw Error(ErrorKind::NotPositiveDefinite,
                "sqrt_pd: eigenvalue range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const RealVector roots = eig.eigenvalues.cwiseSqrt();
  const ComplexMatrix& vecs = eig.eigenvectors;
  return hermitian_part(vecs * roots.cast<Complex>().asDiagonal() * adjoint(vecs));
}

/// Partial-pivot LU inverse.
inline ComplexMatrix inverse(const ComplexMatrix& input) {
  require_operator(input, "inverse");
  const Eigen::Index n = input.rows();
  const double floor = tol::singular_pivot * fro_norm(input);
  ComplexMatrix lu = input;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  double min_pivot = std::numeric_limits<double>::infinity();
  double max_pivot = 0.0;

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    const double mag = std::abs(lu(piv, k));
    if (!(mag > floor) || mag == 0.0)
      throw Error(ErrorKind::Singular, "inverse: pivot " + std::to_string(mag) + " below floor");
    min_pivot = std::min(min_pivot, mag);
    max_pivot = std::max(max_pivot, mag);
    if (piv != k) {
      lu.row(k).swap(lu.row(piv));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      lu(i, k) /= lu(k, k);
      for (Eigen::Index j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
    }
  }
  if (max_pivot / min_pivot > tol::max_condition)
    throw Error(ErrorKind::Singular, "inverse: pivot ratio exceeds condition ceiling");

  ComplexMatrix out(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    ComplexVector x(n);
    // P A = L U; solve L y = P e_col, then U x = y
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex sum = perm[static_cast<std::size_t>(i)] == col ? Complex{1.0} : Complex{0.0};
      for (Eigen::Index j = 0; j < i; ++j) sum -= lu(i, j) * x(j);
      x(i) = sum;
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      Complex sum = x(i);
      for (Eigen::Index j = i + 1; j < n; ++j) sum -= lu(i, j) * x(j);
      x(i) = sum / lu(i, i);
    }
    out.col(col) = x;
  }
  return out;
}

/// Scaling and squaring around a truncated Taylor series.
inline ComplexMatrix expm(const ComplexMatrix& a) {
  require_operator(a, "expm");
  const Eigen::Index n = a.rows();
  const double norm = fro_norm(a);
  int squarings = 0;
  if (norm > tol::expm_scaled_norm)
    squarings = static_cast<int>(std::ceil(std::log2(norm / tol::expm_scaled_norm)));
  const ComplexMatrix x = a / std::ldexp(1.0, squarings);

  // Horner: I + X/1 (I + X/2 (I + ... (I + X/m)))
  ComplexMatrix result = identity(n);
  for (int k = tol::expm_taylor_order; k >= 1; --k)
    result = identity(n) + (x * result) / static_cast<double>(k);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace qhdyn
