#pragma once

// Gaussian pipeline versus the exact Fock-space oracle on small systems:
// seeded random quadratic Hamiltonians and shrunk versions of every protocol.
// Each case reports the largest absolute deviation among ground-state energy,
// occupations, subsystem entropies, local information and Gamma sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "infolat/dynamics.hpp"
#include "infolat/lattice.hpp"
#include "infolat/oracle.hpp"
#include "infolat/protocols.hpp"

namespace infolat::validation {

/// Random chemical potentials on every site plus hopping and pairing on the
/// nearest-neighbor bonds and on random longer bonds.
inline std::vector<HamiltonianTerm> random_terms(Index sites, std::uint64_t seed, bool with_pairing = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<Index> site(0, sites - 1);
  std::vector<HamiltonianTerm> terms;
  for (Index s = 0; s < sites; ++s) terms.push_back(ChemicalPotential{s, amp(rng)});
  for (Index s = 0; s + 1 < sites; ++s) {
    terms.push_back(Hopping{s, s + 1, amp(rng)});
    if (with_pairing) terms.push_back(Pairing{s, s + 1, amp(rng)});
  }
  for (Index k = 0; k < sites; ++k) {
    const Index i = site(rng);
    const Index j = site(rng);
    if (i == j) continue;
    terms.push_back(Hopping{i, j, 0.5 * amp(rng)});
    if (with_pairing) terms.push_back(Pairing{i, j, 0.5 * amp(rng)});
  }
  return terms;
}

struct CaseResult {
  std::string name;
  Index sites = 0;
  double max_deviation = 0.0;
};

struct Report {
  std::vector<CaseResult> cases;

  double max_deviation() const {
    double worst = 0.0;
    for (const auto& c : cases) worst = std::max(worst, c.max_deviation);
    return worst;
  }
  const CaseResult& worst_case() const {
    return *std::max_element(cases.begin(), cases.end(),
                             [](const CaseResult& a, const CaseResult& b) { return a.max_deviation < b.max_deviation; });
  }
};

namespace detail {

struct Tracker {
  double worst = 0.0;
  void operator()(double a, double b) {
    const double d = std::abs(a - b);
    worst = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(worst, d);
  }
};

// Entropies and local information of every subsystem.
inline void compare_lattices(Tracker& track, const InformationLattice& lat, const oracle::Lattice& exact) {
  lat.local().for_each([&](LatticeCoord c, double v) {
    const auto e = static_cast<std::size_t>(c.ell);
    const auto m = static_cast<std::size_t>(c.m);
    track(lat.entropy(c.ell, c.m), exact.entropy[e][m]);
    track(v, exact.local[e][m]);
  });
}

inline PartitionSums oracle_partition_sums(const oracle::Lattice& exact, const RegionSpec& r) {
  PartitionSums sums{};
  for (std::size_t e = 0; e < exact.local.size(); ++e) {
    for (std::size_t m = 0; m < exact.local[e].size(); ++m) {
      sums[slot(classify({static_cast<Index>(e), static_cast<Index>(m)}, r))] += exact.local[e][m];
    }
  }
  return sums;
}

inline void compare_occupations(Tracker& track, const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t s = 0; s < a.size(); ++s) track(a[s], b[s]);
}

}  // namespace detail

/// Ground state of a random Hamiltonian, and the same state evolved under a
/// second random Hamiltonian.
inline CaseResult random_case(Index sites, std::uint64_t seed) {
  const auto pre_terms = random_terms(sites, seed);
  const auto post_terms = random_terms(sites, seed + 7919);
  const auto pre = CouplingMatrix::from_terms(sites, pre_terms);
  const auto post = CouplingMatrix::from_terms(sites, post_terms);
  const auto h_pre = oracle::hamiltonian(pre_terms, sites);
  const auto h_post = oracle::hamiltonian(post_terms, sites);

  detail::Tracker track;
  const auto m0 = ground_state(pre);
  const auto exact0 = oracle::ground_state(h_pre);
  track(ground_state_energy(pre), exact0.energy);
  detail::compare_occupations(track, occupation_density(m0), oracle::occupations(exact0.vector, sites));
  detail::compare_lattices(track, local_information(m0), oracle::lattice(exact0.vector, sites));

  const double t = 1.3;
  const auto mt = evolve(m0, post, t);
  const auto psi_t = oracle::Propagator(h_post).evolve(exact0.vector, t);
  detail::compare_occupations(track, occupation_density(mt), oracle::occupations(psi_t, sites));
  detail::compare_lattices(track, local_information(mt), oracle::lattice(psi_t, sites));
  return {fmt::format("random N={} seed={}", sites, seed), sites, track.worst};
}

/// Shrunk protocol run versus the oracle: baseline lattice, snapshot lattices,
/// occupations and Gamma sums at every sampled time.
inline CaseResult protocol_case(const QuenchConfig& base) {
  QuenchConfig c = base;
  c.times = {0.7, 2.5};
  c.snapshot_times = c.times;
  c.baseline_lattice = true;
  c.validate();
  const Index n = c.total_sites();
  const QuenchSetup setup = build_quench(c);
  const RunResult result = run(c, 1);

  // The oracle resolves a zero-energy pair with the mode the Gaussian rule
  // empties: the delocalized Kitaev edge mode or the decoupled effective site.
  std::optional<oracle::ZeroModeDeclaration> mode;
  if (c.protocol == Protocol::kitaev_probe) {
    mode = oracle::ZeroModeDeclaration::from_indices(n, 2 * c.lq - 1, 0);
  } else if (c.protocol == Protocol::effective_model) {
    mode = oracle::ZeroModeDeclaration::from_indices(n, 1, 0);
  }
  const auto h_pre = oracle::hamiltonian(setup.pre.terms(), n);
  const auto h_post = oracle::hamiltonian(setup.post.terms(), n);
  const auto exact0 = oracle::ground_state(h_pre, mode);

  detail::Tracker track;
  track(energy(setup.pre, ground_state(setup.pre, setup.options)), exact0.energy);
  const auto base_lattice = oracle::lattice(exact0.vector, n);
  detail::compare_lattices(track, *result.baseline, base_lattice);
  const PartitionSums base_sums = detail::oracle_partition_sums(base_lattice, result.regions);

  const oracle::Propagator propagate(h_post);
  for (std::size_t k = 0; k < result.times.size(); ++k) {
    const auto psi = propagate.evolve(exact0.vector, result.times[k]);
    const auto exact = oracle::lattice(psi, n);
    detail::compare_lattices(track, result.snapshots[k].lattice, exact);
    detail::compare_occupations(track, result.occupation[k], oracle::occupations(psi, n));
    const PartitionSums sums = detail::oracle_partition_sums(exact, result.regions);
    for (auto p : all_partitions) track(result.gamma.at(p)[k], sums[slot(p)] - base_sums[slot(p)]);
  }
  return {fmt::format("{} N={}", protocol_name(c.protocol), n), n, track.worst};
}

/// Shrunk configurations of every protocol, small enough for the oracle.
inline std::vector<QuenchConfig> shrunk_protocols() {
  std::vector<QuenchConfig> out;
  {
    auto c = default_config(Protocol::release_particle);
    c.sites = 7;
    out.push_back(c);
  }
  {
    auto c = default_config(Protocol::barrier_removal);
    c.sites = 8;
    out.push_back(c);
    c.sites = 7;
    c.barrier_width = 3;
    out.push_back(c);
  }
  {
    auto c = default_config(Protocol::kitaev_probe);
    c.lq = 3;
    c.probe_length = 4;
    c.tau = 5.0;
    c.tau_t = 0.5;
    c.tracked.clear();
    out.push_back(c);
  }
  {
    auto c = default_config(Protocol::kitaev_probe_detuned);
    c.lq = 4;
    c.probe_length = 4;
    c.tau = 5.0;
    c.mu = 3.0;
    c.tau_t = 0.5;
    out.push_back(c);
  }
  {
    auto c = default_config(Protocol::effective_model);
    c.probe_length = 6;  // even, so the probe has no zero mode of its own
    c.tau_t = 0.8;
    out.push_back(c);
  }
  return out;
}

/// The full suite: `random_cases` seeded Hamiltonians on 2..8 sites plus the
/// shrunk protocols.
inline Report run_suite(int random_cases = 60) {
  Report report;
  for (int k = 0; k < random_cases; ++k) {
    const Index sites = 2 + k % 7;
    report.cases.push_back(random_case(sites, 1000 + static_cast<std::uint64_t>(k)));
  }
  for (const auto& c : shrunk_protocols()) report.cases.push_back(protocol_case(c));
  return report;
}

}  // namespace infolat::validation
