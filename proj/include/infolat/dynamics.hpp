#pragma once

// Ground states and exact time evolution of quadratic Majorana Hamiltonians.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "infolat/errors.hpp"
#include "infolat/gaussian.hpp"

namespace infolat {

/// Real canonical form A = O diag([[0, e_k], [-e_k, 0]]) O^T with O orthogonal,
/// e_k >= 0 sorted ascending. Pair k occupies columns 2k and 2k+1 of `basis`.
struct CanonicalForm {
  Eigen::MatrixXd basis;
  Eigen::VectorXd energies;

  Index pairs() const { return energies.size(); }
  Eigen::MatrixXd block_matrix() const {
    const Index n = basis.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Index k = 0; k < pairs(); ++k) {
      d(2 * k, 2 * k + 1) = energies(k);
      d(2 * k + 1, 2 * k) = -energies(k);
    }
    return d;
  }
  Eigen::MatrixXd reconstruct() const { return basis * block_matrix() * basis.transpose(); }
};

/// Canonical form via a real Schur decomposition. An antisymmetric matrix is
/// normal, so its quasi-triangular Schur factor is block diagonal up to
/// round-off; 1x1 blocks are exact zero modes and get paired in order.
inline CanonicalForm canonical_form(const Eigen::MatrixXd& a) {
  const Index n = a.rows();
  if (n != a.cols() || n % 2 != 0) {
    throw std::invalid_argument(fmt::format("canonical form needs an even square matrix, got {}x{}", a.rows(), a.cols()));
  }
  const Eigen::MatrixXd sym = 0.5 * (a - a.transpose());
  Eigen::RealSchur<Eigen::MatrixXd> schur(sym);
  if (schur.info() != Eigen::Success) throw NumericError("real Schur decomposition did not converge");
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& u = schur.matrixU();

  struct Block {
    Index first, second;
    double energy;
  };
  std::vector<Block> blocks;
  std::vector<Index> singles;
  for (Index i = 0; i < n;) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      const double e = 0.5 * (t(i, i + 1) - t(i + 1, i));
      if (e >= 0) {
        blocks.push_back({i, i + 1, e});
      } else {
        blocks.push_back({i + 1, i, -e});
      }
      i += 2;
    } else {
      singles.push_back(i);
      i += 1;
    }
  }
  // Even dimension and 2x2 blocks imply an even number of 1x1 blocks.
  for (std::size_t k = 0; k + 1 < singles.size(); k += 2) blocks.push_back({singles[k], singles[k + 1], 0.0});

  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) { return x.energy < y.energy; });

  CanonicalForm cf;
  cf.basis.resize(n, n);
  cf.energies.resize(n / 2);
  for (Index k = 0; k < n / 2; ++k) {
    const auto& b = blocks[static_cast<std::size_t>(k)];
    cf.basis.col(2 * k) = u.col(b.first);
    cf.basis.col(2 * k + 1) = u.col(b.second);
    cf.energies(k) = b.energy;
  }
  return cf;
}

enum class DegeneracyPolicy {
  error,                     ///< zero modes make the ground state ambiguous: throw
  occupy_zero_modes_empty,   ///< resolve zero modes so each paired mode is empty
};

struct GroundStateOptions {
  DegeneracyPolicy policy = DegeneracyPolicy::error;
  /// Single-particle energies at or below relative_threshold * ||A||_2 count as zero modes.
  double relative_threshold = 1e-8;
};

namespace detail {

// Adds the empty-mode covariance of the Majorana pair (u, v), i.e. the state
// with n = (1 + i gamma_u gamma_v) / 2 = 0, M_uv = -1.
inline void add_empty_pair(Eigen::MatrixXd& m, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  m.noalias() -= u * v.transpose();
  m.noalias() += v * u.transpose();
}

// Flips v so its largest-magnitude component is positive.
inline Eigen::VectorXd orient(Eigen::VectorXd v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
  return v;
}

// Fixes the state inside a zero-mode subspace spanned by the orthonormal
// columns of z. First the projected particle number is minimized; what it
// leaves undetermined is paired B-dominant with A-dominant, f = (g_B + i g_A)/2,
// with f empty. For the sweet-spot Kitaev chain this is f = (g_R + i g_L)/2.
inline void resolve_zero_modes(Eigen::MatrixXd& m, const Eigen::MatrixXd& z) {
  const Index n = z.rows();
  const Index dim = z.cols();
  if (dim == 0) return;

  Eigen::MatrixXd number = Eigen::MatrixXd::Zero(n, n);
  for (Index s = 0; s < n / 2; ++s) {
    number(2 * s + 1, 2 * s) = 1.0;
    number(2 * s, 2 * s + 1) = -1.0;
  }
  const Eigen::MatrixXd projected = z.transpose() * number * z;
  const CanonicalForm cf = canonical_form(projected);
  constexpr double resolved = 1e-6;

  std::vector<Index> leftover;
  for (Index k = 0; k < cf.pairs(); ++k) {
    if (cf.energies(k) > resolved) {
      add_empty_pair(m, z * cf.basis.col(2 * k), z * cf.basis.col(2 * k + 1));
    } else {
      leftover.push_back(2 * k);
      leftover.push_back(2 * k + 1);
    }
  }
  if (leftover.empty()) return;

  Eigen::MatrixXd rest(n, static_cast<Index>(leftover.size()));
  for (std::size_t c = 0; c < leftover.size(); ++c) rest.col(static_cast<Index>(c)) = z * cf.basis.col(leftover[c]);

  Eigen::MatrixXd b_weight = Eigen::MatrixXd::Zero(rest.cols(), rest.cols());
  for (Index s = 0; s < n / 2; ++s) {
    const auto row = rest.row(2 * s + 1);
    b_weight.noalias() += row.transpose() * row;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b_weight);
  const Index half = rest.cols() / 2;
  for (Index k = 0; k < half; ++k) {
    // Ascending eigenvalues: the first half is A-dominant, the second B-dominant.
    const Eigen::VectorXd a_like = orient(rest * eig.eigenvectors().col(half - 1 - k));
    const Eigen::VectorXd b_like = orient(rest * eig.eigenvectors().col(rest.cols() - 1 - k));
    add_empty_pair(m, b_like, a_like);
  }
}

}  // namespace detail

/// Covariance of the Gaussian state minimizing <H>.
inline CovarianceMatrix ground_state(const CouplingMatrix& h, const GroundStateOptions& options = {}) {
  const CanonicalForm cf = canonical_form(h.matrix());
  const Index n = h.dimension();
  const double norm = cf.pairs() ? cf.energies.maxCoeff() : 0.0;
  const double threshold = options.relative_threshold * norm;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::vector<Index> zero_cols;
  for (Index k = 0; k < cf.pairs(); ++k) {
    if (cf.energies(k) <= threshold) {
      zero_cols.push_back(2 * k);
      zero_cols.push_back(2 * k + 1);
      continue;
    }
    detail::add_empty_pair(m, cf.basis.col(2 * k), cf.basis.col(2 * k + 1));
  }

  if (!zero_cols.empty()) {
    if (options.policy == DegeneracyPolicy::error) {
      throw DegenerateGroundStateError(fmt::format(
          "{} single-particle energies at or below {:.3g}: ground state is ambiguous (add a small chemical "
          "potential such as mu_p_regularizer, or use the occupy_zero_modes_empty policy)",
          zero_cols.size() / 2, threshold));
    }
    Eigen::MatrixXd z(n, static_cast<Index>(zero_cols.size()));
    for (std::size_t c = 0; c < zero_cols.size(); ++c) z.col(static_cast<Index>(c)) = cf.basis.col(zero_cols[c]);
    detail::resolve_zero_modes(m, z);
  }
  return CovarianceMatrix(0.5 * (m - m.transpose()));
}

inline CovarianceMatrix ground_state(const CouplingMatrix& h, DegeneracyPolicy policy) {
  return ground_state(h, GroundStateOptions{policy, 1e-8});
}

/// <H> = offset + (1/4) sum_jk A_jk M_jk.
inline double energy(const CouplingMatrix& h, const CovarianceMatrix& m) {
  if (h.dimension() != m.dimension()) throw std::invalid_argument("energy: dimension mismatch");
  return h.offset() + 0.25 * h.matrix().cwiseProduct(m.matrix()).sum();
}

/// Energy of the exact ground state, offset - sum_k e_k / 2.
inline double ground_state_energy(const CouplingMatrix& h) {
  return h.offset() - 0.5 * canonical_form(h.matrix()).energies.sum();
}

/// <c_i^dag c_i> = (1 + M_{B_i, A_i}) / 2 for every site.
inline std::vector<double> occupation_density(const CovarianceMatrix& m) {
  const auto& mat = m.matrix();
  std::vector<double> n(static_cast<std::size_t>(m.sites()));
  for (Index s = 0; s < m.sites(); ++s) {
    n[static_cast<std::size_t>(s)] = 0.5 * (1.0 + mat(2 * s + 1, 2 * s));
  }
  return n;
}

/// Exact evolution M(t) = O(t) M0 O(t)^T with O(t) = exp(A t), built once from
/// the canonical form of A and evaluated in closed form at any t. Immutable
/// after construction; evolve() may be called concurrently.
class Evolver {
 public:
  Evolver(const CouplingMatrix& h, const CovarianceMatrix& initial)
      : form_(canonical_form(h.matrix())), rotated_initial_(form_.basis.transpose() * initial.matrix() * form_.basis) {
    if (h.dimension() != initial.dimension()) {
      throw std::invalid_argument(
          fmt::format("evolve: Hamiltonian has dimension {}, state {}", h.dimension(), initial.dimension()));
    }
  }

  CovarianceMatrix evolve(double t) const {
    Eigen::MatrixXd x = rotated_initial_;
    for (Index k = 0; k < form_.pairs(); ++k) {
      const double angle = form_.energies(k) * t;
      if (angle == 0.0) continue;
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      // exp(t [[0, e], [-e, 0]]) = [[c, s], [-s, c]] applied from the left and right.
      const Eigen::RowVectorXd r0 = x.row(2 * k);
      const Eigen::RowVectorXd r1 = x.row(2 * k + 1);
      x.row(2 * k) = c * r0 + s * r1;
      x.row(2 * k + 1) = -s * r0 + c * r1;
      const Eigen::VectorXd c0 = x.col(2 * k);
      const Eigen::VectorXd c1 = x.col(2 * k + 1);
      x.col(2 * k) = c * c0 + s * c1;
      x.col(2 * k + 1) = -s * c0 + c * c1;
    }
    Eigen::MatrixXd tmp;
    tmp.noalias() = form_.basis * x;
    Eigen::MatrixXd m;
    m.noalias() = tmp * form_.basis.transpose();
    return CovarianceMatrix(0.5 * (m - m.transpose()));
  }

  const CanonicalForm& form() const { return form_; }

 private:
  CanonicalForm form_;
  Eigen::MatrixXd rotated_initial_;
};

inline CovarianceMatrix evolve(const CovarianceMatrix& initial, const CouplingMatrix& h, double t) {
  return Evolver(h, initial).evolve(t);
}

}  // namespace infolat
