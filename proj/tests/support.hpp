#pragma once

// Shared fixtures for the test suites: seeded random quadratic Hamiltonians and
// helpers to push the same state through both the Gaussian and Fock pictures.

#include <cstdint>

#include "infolat/dynamics.hpp"
#include "infolat/gaussian.hpp"
#include "infolat/oracle.hpp"
#include "infolat/validation.hpp"

namespace infolat::fixtures {

using validation::random_terms;

/// A generic pure state in both pictures: ground state of one random
/// Hamiltonian evolved for time t under another.
struct TwinState {
  CovarianceMatrix gaussian;
  oracle::State fock;
};

inline TwinState random_twin_state(Index sites, std::uint64_t seed, double t = 1.3) {
  const auto pre_terms = random_terms(sites, seed);
  const auto post_terms = random_terms(sites, seed + 7919);
  const auto pre = CouplingMatrix::from_terms(sites, pre_terms);
  const auto post = CouplingMatrix::from_terms(sites, post_terms);
  const auto h_pre = oracle::hamiltonian(pre_terms, sites);
  const auto h_post = oracle::hamiltonian(post_terms, sites);
  TwinState twin;
  twin.gaussian = evolve(ground_state(pre), post, t);
  twin.fock = oracle::Propagator(h_post).evolve(oracle::ground_state(h_pre).vector, t);
  return twin;
}

}  // namespace infolat::fixtures
