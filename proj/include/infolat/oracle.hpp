#pragma once

// Brute-force many-body reference for small chains (N <= 12).
//
// Basis: occupation bitstrings, site s <-> bit s (site 0 least significant).
// Jordan-Wigner ordering follows the site index:
//   c_s |b> = (-1)^{popcount(b & ((1 << s) - 1))} |b with bit s cleared>  if bit s is set.
// Hamiltonians with real amplitudes give real symmetric Fock matrices; states
// are complex so that real-time evolution stays exact.
//
// Nothing here shares code with the Gaussian pipeline beyond the term types.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "infolat/gaussian.hpp"

namespace infolat::oracle {

inline constexpr Index max_sites = 12;

using State = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Dense Fock-space operator on `sites` sites.
struct FockOperator {
  Index sites = 0;
  Eigen::MatrixXd matrix;
};

inline void check_size(Index sites) {
  if (sites < 1 || sites > max_sites) {
    throw std::invalid_argument(fmt::format("exact oracle supports 1..{} sites, got {}", max_sites, sites));
  }
}

namespace detail {

inline double jw_sign(std::uint64_t bits, Index site) {
  const std::uint64_t below = bits & ((std::uint64_t{1} << site) - 1);
  return (std::popcount(below) % 2) ? -1.0 : 1.0;
}

// Result of a single creation/annihilation on a basis state; sign 0 means the
// state is annihilated.
struct Action {
  std::uint64_t bits;
  double sign;
};

inline Action annihilate(std::uint64_t bits, Index site) {
  const std::uint64_t mask = std::uint64_t{1} << site;
  if (!(bits & mask)) return {bits, 0.0};
  return {bits ^ mask, jw_sign(bits, site)};
}

inline Action create(std::uint64_t bits, Index site) {
  const std::uint64_t mask = std::uint64_t{1} << site;
  if (bits & mask) return {bits, 0.0};
  return {bits ^ mask, jw_sign(bits, site)};
}

// Applies op2 then op1 (i.e. the product op1 op2) to a basis state.
template <class Op1, class Op2>
Action chain(std::uint64_t bits, Op1 op1, Op2 op2) {
  const Action first = op2(bits);
  if (first.sign == 0.0) return first;
  const Action second = op1(first.bits);
  return {second.bits, first.sign * second.sign};
}

}  // namespace detail

/// Second-quantized Hamiltonian built from the physical terms.
inline FockOperator hamiltonian(std::span<const HamiltonianTerm> terms, Index sites) {
  check_size(sites);
  const Index dim = Index{1} << sites;
  FockOperator h{sites, Eigen::MatrixXd::Zero(dim, dim)};
  using detail::annihilate;
  using detail::create;

  auto add_product = [&](double amplitude, auto op1, auto op2) {
    for (Index b = 0; b < dim; ++b) {
      const auto act = detail::chain(static_cast<std::uint64_t>(b), op1, op2);
      if (act.sign != 0.0) h.matrix(static_cast<Index>(act.bits), b) += amplitude * act.sign;
    }
  };

  for (const auto& term : terms) {
    if (const auto* t = std::get_if<ChemicalPotential>(&term)) {
      if (t->site < 0 || t->site >= sites) throw std::invalid_argument("oracle: site out of range");
      for (Index b = 0; b < dim; ++b) {
        if (b & (Index{1} << t->site)) h.matrix(b, b) += t->mu;
      }
    } else if (const auto* t = std::get_if<Hopping>(&term)) {
      const Index i = t->i, j = t->j;
      // c_i^dag c_j + c_j^dag c_i
      add_product(t->amplitude, [i](auto b) { return create(b, i); }, [j](auto b) { return annihilate(b, j); });
      add_product(t->amplitude, [j](auto b) { return create(b, j); }, [i](auto b) { return annihilate(b, i); });
    } else if (const auto* t = std::get_if<Pairing>(&term)) {
      const Index i = t->i, j = t->j;
      // c_i c_j + c_j^dag c_i^dag
      add_product(t->amplitude, [i](auto b) { return annihilate(b, i); }, [j](auto b) { return annihilate(b, j); });
      add_product(t->amplitude, [j](auto b) { return create(b, j); }, [i](auto b) { return create(b, i); });
    }
  }
  return h;
}

/// Applies the Majorana operator with index k (A: 2s, B: 2s+1) to a state:
/// gamma_B = c + c^dag, gamma_A = -i (c - c^dag).
inline State apply_majorana(const State& psi, Index sites, Index k) {
  const Index site = k / 2;
  const bool is_b = (k % 2) == 1;
  State out = State::Zero(psi.size());
  for (Index b = 0; b < psi.size(); ++b) {
    if (psi(b) == Complex{}) continue;
    const auto bits = static_cast<std::uint64_t>(b);
    const auto down = detail::annihilate(bits, site);
    const auto up = detail::create(bits, site);
    if (down.sign != 0.0) {
      out(static_cast<Index>(down.bits)) += (is_b ? Complex{1, 0} : Complex{0, -1}) * down.sign * psi(b);
    }
    if (up.sign != 0.0) {
      out(static_cast<Index>(up.bits)) += (is_b ? Complex{1, 0} : Complex{0, 1}) * up.sign * psi(b);
    }
  }
  (void)sites;
  return out;
}

/// Applies sum_k v_k gamma_k.
inline State apply_majorana(const State& psi, Index sites, const Eigen::VectorXd& v) {
  State out = State::Zero(psi.size());
  for (Index k = 0; k < v.size(); ++k) {
    if (v(k) != 0.0) out += v(k) * apply_majorana(psi, sites, k);
  }
  return out;
}

/// Fermionic mode f = (gamma_R + i gamma_L) / 2 with gamma_R, gamma_L given as
/// real unit vectors over the Majorana index.
struct ZeroModeDeclaration {
  Eigen::VectorXd right;
  Eigen::VectorXd left;

  static ZeroModeDeclaration from_indices(Index sites, Index right, Index left) {
    ZeroModeDeclaration f{Eigen::VectorXd::Zero(2 * sites), Eigen::VectorXd::Zero(2 * sites)};
    f.right(right) = 1.0;
    f.left(left) = 1.0;
    return f;
  }
};

/// n_f = (1 + i gamma_R gamma_L) / 2 applied to psi.
inline State apply_mode_number(const State& psi, Index sites, const ZeroModeDeclaration& f) {
  const State gl = apply_majorana(psi, sites, f.left);
  const State grl = apply_majorana(gl, sites, f.right);
  return 0.5 * (psi + Complex{0, 1} * grl);
}

struct GroundState {
  State vector;
  double energy = 0.0;
  Index degeneracy = 1;
};

/// Lowest eigenvector. Degenerate subspaces (gap below `tolerance`) are resolved
/// by minimizing <n_f> when a zero mode is declared; otherwise they are an error.
inline GroundState ground_state(const FockOperator& h, std::optional<ZeroModeDeclaration> f = std::nullopt,
                                double tolerance = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.matrix);
  const auto& e = eig.eigenvalues();
  Index deg = 1;
  while (deg < e.size() && e(deg) - e(0) < tolerance) ++deg;

  GroundState gs;
  gs.energy = e(0);
  gs.degeneracy = deg;
  if (deg == 1) {
    gs.vector = eig.eigenvectors().col(0).cast<Complex>();
    return gs;
  }
  if (!f) {
    throw std::runtime_error(fmt::format("oracle ground state is {}-fold degenerate and no zero mode is declared", deg));
  }
  const Eigen::MatrixXcd sub = eig.eigenvectors().leftCols(deg).cast<Complex>();
  Eigen::MatrixXcd nf(deg, deg);
  for (Index c = 0; c < deg; ++c) {
    const State applied = apply_mode_number(sub.col(c), h.sites, *f);
    nf.col(c) = sub.adjoint() * applied;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> inner(0.5 * (nf + nf.adjoint()));
  if (inner.eigenvalues().size() > 1 && inner.eigenvalues()(1) - inner.eigenvalues()(0) < tolerance) {
    throw std::runtime_error("oracle: declared zero mode does not lift the ground-state degeneracy");
  }
  gs.vector = sub * inner.eigenvectors().col(0);
  return gs;
}

/// Exact propagator exp(-i H t) from the full spectral decomposition.
class Propagator {
 public:
  explicit Propagator(const FockOperator& h) : eig_(h.matrix) {}

  State evolve(const State& psi, double t) const {
    const Eigen::VectorXcd coeff = eig_.eigenvectors().transpose().cast<Complex>() * psi;
    Eigen::VectorXcd phased(coeff.size());
    for (Index k = 0; k < coeff.size(); ++k) phased(k) = std::exp(Complex{0, -eig_.eigenvalues()(k) * t}) * coeff(k);
    return eig_.eigenvectors().cast<Complex>() * phased;
  }

  const Eigen::VectorXd& spectrum() const { return eig_.eigenvalues(); }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
};

inline Eigen::VectorXd spectrum(const FockOperator& h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.matrix, Eigen::EigenvaluesOnly).eigenvalues();
}

inline double expectation(const FockOperator& h, const State& psi) {
  return (psi.adjoint() * h.matrix.cast<Complex>() * psi)(0).real();
}

/// <c_s^dag c_s> for every site.
inline std::vector<double> occupations(const State& psi, Index sites) {
  std::vector<double> n(static_cast<std::size_t>(sites), 0.0);
  for (Index b = 0; b < psi.size(); ++b) {
    const double w = std::norm(psi(b));
    for (Index s = 0; s < sites; ++s) {
      if (b & (Index{1} << s)) n[static_cast<std::size_t>(s)] += w;
    }
  }
  return n;
}

/// Reduced density matrix of sites [first, first + count) by tracing out all
/// other bits.
inline Eigen::MatrixXcd reduced_density_matrix(const State& psi, Index sites, Index first, Index count) {
  check_size(sites);
  if (first < 0 || count < 1 || first + count > sites) throw std::invalid_argument("oracle: region out of range");
  const Index inner = Index{1} << count;
  const Index rest = Index{1} << (sites - count);
  const Index low_mask = (Index{1} << first) - 1;
  Eigen::MatrixXcd amp(inner, rest);
  for (Index b = 0; b < psi.size(); ++b) {
    const Index r = (b >> first) & (inner - 1);
    const Index low = b & low_mask;
    const Index high = b >> (first + count);
    amp(r, low | (high << first)) = psi(b);
  }
  return amp * amp.adjoint();
}

/// Von Neumann entropy in bits of sites [first, first + count); zero for count == 0.
inline double entropy(const State& psi, Index sites, Index first, Index count) {
  if (count == 0) return 0.0;
  const Eigen::MatrixXcd rho = reduced_density_matrix(psi, sites, first, count);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double p = eig.eigenvalues()(k);
    if (p > 1e-300) s -= p * std::log2(p);
  }
  return s;
}

/// Entropies S[ell][m] and local information i[ell][m] of every contiguous
/// subsystem, stored as nested vectors indexed [ell][m].
struct Lattice {
  std::vector<std::vector<double>> entropy;
  std::vector<std::vector<double>> local;
};

inline Lattice lattice(const State& psi, Index sites) {
  Lattice lat;
  const auto n = static_cast<std::size_t>(sites);
  lat.entropy.resize(n);
  lat.local.resize(n);
  for (std::size_t ell = 0; ell < n; ++ell) {
    for (std::size_t m = 0; m + ell < n; ++m) {
      lat.entropy[ell].push_back(entropy(psi, sites, static_cast<Index>(m), static_cast<Index>(ell + 1)));
    }
  }
  auto info = [&](long ell, std::size_t m) {
    if (ell < 0) return 0.0;
    return static_cast<double>(ell + 1) - lat.entropy[static_cast<std::size_t>(ell)][m];
  };
  for (std::size_t ell = 0; ell < n; ++ell) {
    const long l = static_cast<long>(ell);
    for (std::size_t m = 0; m + ell < n; ++m) {
      lat.local[ell].push_back(info(l, m) - info(l - 1, m) - (ell >= 1 ? info(l - 1, m + 1) : 0.0) +
                               (ell >= 2 ? info(l - 2, m + 1) : 0.0));
    }
  }
  return lat;
}

/// Majorana covariance M_jk = (i/2) <[gamma_j, gamma_k]> of a Fock state.
inline Eigen::MatrixXd covariance(const State& psi, Index sites) {
  const Index n = 2 * sites;
  std::vector<State> applied;
  applied.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) applied.push_back(apply_majorana(psi, sites, k));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      if (j == k) continue;
      // <gamma_j gamma_k> = <gamma_j psi | gamma_k psi> since gamma_j is Hermitian.
      const Complex corr = applied[static_cast<std::size_t>(j)].dot(applied[static_cast<std::size_t>(k)]);
      m(j, k) = (Complex{0, 1} * corr).real();
    }
  }
  return m;
}

}  // namespace infolat::oracle
