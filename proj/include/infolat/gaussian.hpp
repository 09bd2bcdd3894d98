#pragma once

// Majorana-basis representation of quadratic fermionic Hamiltonians and
// Gaussian states.
//
// Layout: physical site s carries two Majoranas, gamma_A(s) at index 2s and
// gamma_B(s) at index 2s+1, with c_s = (gamma_B + i gamma_A) / 2. A quadratic
// Hamiltonian is stored as H = (i/4) sum_jk A_jk gamma_j gamma_k + offset with
// A real antisymmetric; a Gaussian state as M_jk = (i/2) <[gamma_j, gamma_k]>.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "infolat/errors.hpp"

namespace infolat {

using Index = Eigen::Index;

enum class Species { A, B };

/// Majorana index of (site, species): A -> 2*site, B -> 2*site + 1.
constexpr Index majorana_index(Index site, Species species) {
  return 2 * site + (species == Species::B ? 1 : 0);
}

struct SiteIndexing {
  Index sites = 0;

  constexpr Index majoranas() const { return 2 * sites; }
  constexpr Index majorana_of(Index site, Species species) const {
    return majorana_index(site, species);
  }
  constexpr Index site_of(Index majorana) const { return majorana / 2; }
  constexpr Species species_of(Index majorana) const {
    return majorana % 2 == 0 ? Species::A : Species::B;
  }
};

/// mu * c_site^dag c_site
struct ChemicalPotential {
  Index site = 0;
  double mu = 0.0;
  bool operator==(const ChemicalPotential&) const = default;
};

/// amplitude * (c_i^dag c_j + h.c.)
struct Hopping {
  Index i = 0;
  Index j = 0;
  double amplitude = 0.0;
  bool operator==(const Hopping&) const = default;
};

/// amplitude * (c_i c_j + h.c.)
struct Pairing {
  Index i = 0;
  Index j = 0;
  double amplitude = 0.0;
  bool operator==(const Pairing&) const = default;
};

using HamiltonianTerm = std::variant<ChemicalPotential, Hopping, Pairing>;

/// Real antisymmetric single-particle matrix A of a quadratic Hamiltonian,
/// together with the constant energy offset and the physical terms it came from.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  explicit CouplingMatrix(Index sites) : sites_(sites), matrix_(Eigen::MatrixXd::Zero(2 * sites, 2 * sites)) {
    if (sites < 1) throw std::invalid_argument("CouplingMatrix needs at least one site");
  }

  static CouplingMatrix from_terms(Index sites, std::span<const HamiltonianTerm> terms) {
    CouplingMatrix result(sites);
    for (const auto& term : terms) result.add(term);
    return result;
  }

  void add(const HamiltonianTerm& term) {
    std::visit([this](const auto& t) { add_term(t); }, term);
    terms_.push_back(term);
  }

  Index sites() const { return sites_; }
  Index dimension() const { return 2 * sites_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double offset() const { return offset_; }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }

 private:
  void check_site(Index s) const {
    if (s < 0 || s >= sites_) {
      throw std::invalid_argument(fmt::format("site {} out of range [0, {})", s, sites_));
    }
  }
  void check_bond(Index i, Index j) const {
    check_site(i);
    check_site(j);
    if (i == j) throw std::invalid_argument(fmt::format("bond term needs distinct sites, got {} twice", i));
  }
  // A(row, col) += value, A(col, row) -= value.
  void add_pair(Index row, Index col, double value) {
    matrix_(row, col) += value;
    matrix_(col, row) -= value;
  }

  // mu c^dag c = mu/2 + (i mu / 2) gamma_B gamma_A
  void add_term(const ChemicalPotential& t) {
    check_site(t.site);
    add_pair(majorana_index(t.site, Species::B), majorana_index(t.site, Species::A), t.mu);
    offset_ += 0.5 * t.mu;
  }
  // w (c_i^dag c_j + h.c.) = (i w / 2)(gamma_Bi gamma_Aj + gamma_Bj gamma_Ai)
  void add_term(const Hopping& t) {
    check_bond(t.i, t.j);
    add_pair(majorana_index(t.i, Species::B), majorana_index(t.j, Species::A), t.amplitude);
    add_pair(majorana_index(t.j, Species::B), majorana_index(t.i, Species::A), t.amplitude);
  }
  // d (c_i c_j + h.c.) = (i d / 2)(gamma_Bi gamma_Aj - gamma_Bj gamma_Ai)
  void add_term(const Pairing& t) {
    check_bond(t.i, t.j);
    add_pair(majorana_index(t.i, Species::B), majorana_index(t.j, Species::A), t.amplitude);
    add_pair(majorana_index(t.j, Species::B), majorana_index(t.i, Species::A), -t.amplitude);
  }

  Index sites_ = 0;
  Eigen::MatrixXd matrix_;
  double offset_ = 0.0;
  std::vector<HamiltonianTerm> terms_;
};

/// Majorana covariance matrix M_jk = (i/2) <[gamma_j, gamma_k]> of a Gaussian state.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  explicit CovarianceMatrix(Eigen::MatrixXd m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() % 2 != 0) {
      throw std::invalid_argument(
          fmt::format("covariance must be square with even dimension, got {}x{}", matrix_.rows(), matrix_.cols()));
    }
  }

  /// Fully mixed state, M = 0.
  static CovarianceMatrix maximally_mixed(Index sites) {
    return CovarianceMatrix(Eigen::MatrixXd::Zero(2 * sites, 2 * sites));
  }

  /// Fock state with the given occupation per site (true = occupied).
  static CovarianceMatrix product_state(const std::vector<bool>& occupied) {
    const auto n = static_cast<Index>(occupied.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Index s = 0; s < n; ++s) {
      const double v = occupied[static_cast<std::size_t>(s)] ? 1.0 : -1.0;
      m(2 * s + 1, 2 * s) = v;
      m(2 * s, 2 * s + 1) = -v;
    }
    return CovarianceMatrix(std::move(m));
  }

  Index sites() const { return matrix_.rows() / 2; }
  Index dimension() const { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  /// Max |M + M^T|.
  double antisymmetry_error() const { return (matrix_ + matrix_.transpose()).cwiseAbs().maxCoeff(); }

  /// Max |M M^T - 1|; zero for pure states.
  double purity_error() const {
    const Index n = dimension();
    return (matrix_ * matrix_.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  }
  bool is_pure(double tol = 1e-9) const { return purity_error() <= tol; }

 private:
  Eigen::MatrixXd matrix_;
};

// ---------------------------------------------------------------------------
// Hamiltonian builders. All energies in units of the probe hopping tau_p.

/// Open tight-binding chain: mu_center on `special_sites`, mu_bulk elsewhere,
/// (tau_p / 2)(c_i^dag c_{i+1} + h.c.) on every bond.
inline CouplingMatrix build_tb_hamiltonian(Index sites, const std::set<Index>& special_sites, double mu_center,
                                           double mu_bulk, double tau_p) {
  if (sites < 2) throw std::invalid_argument(fmt::format("tight-binding chain needs N >= 2, got {}", sites));
  for (Index s : special_sites) {
    if (s < 0 || s >= sites) throw std::invalid_argument(fmt::format("barrier site {} outside [0, {})", s, sites));
  }
  CouplingMatrix a(sites);
  for (Index s = 0; s < sites; ++s) {
    const double mu = special_sites.contains(s) ? mu_center : mu_bulk;
    if (mu != 0.0) a.add(ChemicalPotential{s, mu});
  }
  for (Index s = 0; s + 1 < sites; ++s) a.add(Hopping{s, s + 1, 0.5 * tau_p});
  return a;
}

/// Kitaev chain with equal hopping and pairing tau/2 plus a uniform chemical
/// potential mu; mu = 0 is the sweet spot i (tau/2) sum gamma_B,i gamma_A,i+1.
inline CouplingMatrix build_kitaev_with_mu(Index length, double tau, double mu) {
  if (length < 2) throw std::invalid_argument(fmt::format("Kitaev chain needs l_Q >= 2, got {}", length));
  CouplingMatrix a(length);
  if (mu != 0.0) {
    for (Index s = 0; s < length; ++s) a.add(ChemicalPotential{s, mu});
  }
  for (Index s = 0; s + 1 < length; ++s) {
    a.add(Hopping{s, s + 1, 0.5 * tau});
    a.add(Pairing{s, s + 1, 0.5 * tau});
  }
  return a;
}

inline CouplingMatrix build_kitaev_sweet_spot(Index length, double tau) { return build_kitaev_with_mu(length, tau, 0.0); }

/// Places `inner` on sites [first, first + inner.sites()) of `outer` by
/// replaying its terms. Throws if the range leaves the chain.
inline void embed_terms(CouplingMatrix& outer, const CouplingMatrix& inner, Index first) {
  if (first < 0 || first + inner.sites() > outer.sites()) {
    throw std::invalid_argument(fmt::format("cannot place {} sites at offset {} in a chain of {}", inner.sites(), first,
                                            outer.sites()));
  }
  for (const auto& term : inner.terms()) {
    std::visit(
        [&](auto t) {
          if constexpr (std::is_same_v<decltype(t), ChemicalPotential>) {
            t.site += first;
          } else {
            t.i += first;
            t.j += first;
          }
          outer.add(t);
        },
        term);
  }
}

/// Kitaev chain on sites [0, l_Q) joined to a probe chain on [l_Q, N) through
/// (tau_t / 2)(c_{l_Q-1}^dag c_{l_Q} + h.c.). The two parts must already be
/// defined on their own site ranges starting at zero.
inline CouplingMatrix build_composite(const CouplingMatrix& kitaev, const CouplingMatrix& probe, double tau_t) {
  const Index lq = kitaev.sites();
  CouplingMatrix a(lq + probe.sites());
  embed_terms(a, kitaev, 0);
  embed_terms(a, probe, lq);
  if (tau_t != 0.0) a.add(Hopping{lq - 1, lq, 0.5 * tau_t});
  return a;
}

/// Overload matching the (kitaev, probe-range, tau_t) contract with an explicit
/// probe offset; rejects overlapping ranges.
inline CouplingMatrix build_composite(const CouplingMatrix& kitaev, Index probe_first, const CouplingMatrix& probe,
                                      double tau_t) {
  if (probe_first != kitaev.sites()) {
    throw std::invalid_argument(fmt::format("probe must start right after the Kitaev chain (site {}), got {}",
                                            kitaev.sites(), probe_first));
  }
  return build_composite(kitaev, probe, tau_t);
}

/// Single-site model for the Kitaev-probe quench at large tau: site 0 is the
/// delocalized edge mode f, coupled through (tau_t / 4)(c_1^dag - c_1)(f + f^dag)
/// to a tight-binding chain on sites [1, N_eff) with hopping tau_p / 2.
inline CouplingMatrix build_effective_hamiltonian(Index sites, double tau_t, double tau_p, double mu_probe = 0.0) {
  if (sites < 2) throw std::invalid_argument(fmt::format("effective model needs N_eff >= 2, got {}", sites));
  CouplingMatrix a(sites);
  if (tau_t != 0.0) {
    // (c_1^dag - c_1)(f + f^dag) = (c_1^dag f + h.c.) + (f c_1 + h.c.)
    a.add(Hopping{0, 1, 0.25 * tau_t});
    a.add(Pairing{0, 1, 0.25 * tau_t});
  }
  if (mu_probe != 0.0) {
    for (Index s = 1; s < sites; ++s) a.add(ChemicalPotential{s, mu_probe});
  }
  for (Index s = 1; s + 1 < sites; ++s) a.add(Hopping{s, s + 1, 0.5 * tau_p});
  return a;
}

/// Row-major CSV dump of a covariance matrix, 17 significant digits.
inline void write_covariance_csv(const CovarianceMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const auto& mat = m.matrix();
  for (Index r = 0; r < mat.rows(); ++r) {
    for (Index c = 0; c < mat.cols(); ++c) {
      if (c) out << ',';
      out << fmt::format("{:.17g}", mat(r, c));
    }
    out << '\n';
  }
}

inline CovarianceMatrix read_covariance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto next = line.find(',', pos);
      row.push_back(std::stod(line.substr(pos, next - pos)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Index r = 0; r < n; ++r) {
    if (static_cast<Index>(rows[static_cast<std::size_t>(r)].size()) != n) {
      throw std::runtime_error(fmt::format("{}: row {} has wrong length", path, r));
    }
    for (Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return CovarianceMatrix(std::move(m));
}

}  // namespace infolat
