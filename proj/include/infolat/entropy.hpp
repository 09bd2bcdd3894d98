#pragma once

// Von Neumann entropy of Gaussian states from principal blocks of the Majorana
// covariance matrix.

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "infolat/errors.hpp"
#include "infolat/gaussian.hpp"

namespace infolat {

/// Round-off window for symplectic eigenvalues: values up to 1 + clamp_tolerance
/// (or down to -clamp_tolerance) are silently clamped; beyond hard_tolerance the
/// covariance is rejected. In between they are clamped as well.
struct SpectrumTolerance {
  double clamp_tolerance = 1e-9;
  double hard_tolerance = 1e-6;
};

/// Moduli nu_k of the eigenvalue pairs +-i nu_k of a real antisymmetric matrix,
/// sorted descending. Householder reduction to skew-tridiagonal form (reading
/// only the strictly lower triangle), then the equivalent symmetric
/// tridiagonal matrix with zero diagonal whose spectrum is {+-nu_k}.
inline Eigen::VectorXd skew_symmetric_moduli(Eigen::MatrixXd k) {
  const Index n = k.rows();
  if (n == 0) return {};
  if (n == 1) return Eigen::VectorXd::Zero(0);
  Eigen::VectorXd off(n - 1);
  Eigen::VectorXd v(n);
  Eigen::VectorXd p(n);
  for (Index col = 0; col + 2 < n; ++col) {
    const Index m = n - col - 1;
    auto x = k.col(col).segment(col + 1, m);
    const double tail = x.tail(m - 1).squaredNorm();
    if (tail == 0.0) {
      off(col) = x(0);
      continue;
    }
    const double x0 = x(0);
    const double norm = std::sqrt(x0 * x0 + tail);
    const double alpha = x0 > 0 ? -norm : norm;
    auto vs = v.head(m);
    vs = x;
    vs(0) -= alpha;
    const double beta = 2.0 / vs.squaredNorm();
    off(col) = alpha;

    // Trailing block K22 <- H K22 H = K22 + v p^T - p v^T with p = beta K22 v.
    // Only the strictly lower triangle is referenced and updated: with L that
    // triangle, K22 = L - L^T.
    auto k22 = k.bottomRightCorner(m, m);
    auto ps = p.head(m);
    ps.noalias() = k22.template triangularView<Eigen::StrictlyLower>() * vs;
    ps.noalias() -= k22.template triangularView<Eigen::StrictlyLower>().transpose() * vs;
    ps *= beta;
    for (Index j = 0; j + 1 < m; ++j) {
      const Index len = m - j - 1;
      k22.col(j).tail(len) += ps(j) * vs.tail(len) - vs(j) * ps.tail(len);
    }
  }
  off(n - 2) = k(n - 1, n - 2);

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub = off.cwiseAbs();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("tridiagonal eigensolver did not converge");
  // Ascending; the upper half holds the nonnegative members of each +-nu pair.
  return eig.eigenvalues().tail(n / 2).reverse();
}

/// Binary entropy in bits of the mode with symplectic eigenvalue nu, i.e.
/// h2((1 + nu) / 2) evaluated via p = (1 - nu) / 2 for accuracy near nu = 1.
inline double mode_entropy_bits(double nu) {
  const double p = 0.5 * (1.0 - nu);
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log(p) + (1.0 - p) * std::log1p(-p)) / std::numbers::ln2;
}

/// Clamps symplectic eigenvalues into [0, 1]; throws InvalidCovarianceError if
/// any lies outside [-hard_tolerance, 1 + hard_tolerance].
inline void clamp_moduli(Eigen::VectorXd& nu, const SpectrumTolerance& tol = {}) {
  for (Index k = 0; k < nu.size(); ++k) {
    if (nu(k) > 1.0 + tol.hard_tolerance || nu(k) < -tol.hard_tolerance) {
      throw InvalidCovarianceError(
          fmt::format("symplectic eigenvalue {:.12g} outside [0, 1]: not a valid covariance matrix", nu(k)));
    }
    nu(k) = std::clamp(nu(k), 0.0, 1.0);
  }
}

/// Entropy in bits of the Gaussian state restricted to sites [first, first + count).
inline double block_entropy(const CovarianceMatrix& m, Index first, Index count, const SpectrumTolerance& tol = {}) {
  if (count <= 0) return 0.0;
  if (first < 0 || first + count > m.sites()) {
    throw std::out_of_range(fmt::format("sites [{}, {}) outside a chain of {}", first, first + count, m.sites()));
  }
  Eigen::VectorXd nu = skew_symmetric_moduli(m.matrix().block(2 * first, 2 * first, 2 * count, 2 * count));
  clamp_moduli(nu, tol);
  double s = 0.0;
  for (Index k = 0; k < nu.size(); ++k) s += mode_entropy_bits(nu(k));
  return s;
}

/// Checks the covariance invariants: antisymmetry and spectrum of iM in [-1, 1].
inline void validate_covariance(const CovarianceMatrix& m, double antisymmetry_tol = 1e-12,
                                const SpectrumTolerance& tol = {1e-9, 1e-9}) {
  if (m.antisymmetry_error() > antisymmetry_tol) {
    throw InvalidCovarianceError(fmt::format("covariance not antisymmetric (error {:.3g})", m.antisymmetry_error()));
  }
  Eigen::VectorXd nu = skew_symmetric_moduli(m.matrix());
  clamp_moduli(nu, tol);
}

}  // namespace infolat
