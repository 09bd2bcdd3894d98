#pragma once

// Quench experiments as configuration-driven runs: build the pre- and
// post-quench Hamiltonians, prepare the initial state, evolve, and collect the
// information-lattice observables on a time grid.
//
// Per-time observables only need a handful of subsystem entropies (partition
// sums and interface/diagonal sums telescope to region informations), so full
// lattices are computed only for the baseline and requested snapshots.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "infolat/dynamics.hpp"
#include "infolat/errors.hpp"
#include "infolat/fit.hpp"
#include "infolat/lattice.hpp"
#include "infolat/parallel.hpp"

namespace infolat {

enum class Protocol { release_particle, barrier_removal, kitaev_probe, kitaev_probe_detuned, effective_model };

inline constexpr std::array<Protocol, 5> all_protocols{Protocol::release_particle, Protocol::barrier_removal,
                                                      Protocol::kitaev_probe, Protocol::kitaev_probe_detuned,
                                                      Protocol::effective_model};

inline constexpr std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::release_particle: return "release_particle";
    case Protocol::barrier_removal: return "barrier_removal";
    case Protocol::kitaev_probe: return "kitaev_probe";
    case Protocol::kitaev_probe_detuned: return "kitaev_probe_detuned";
    case Protocol::effective_model: return "effective_model";
  }
  return "?";
}

inline Protocol protocol_from_name(std::string_view name) {
  for (auto p : all_protocols) {
    if (protocol_name(p) == name) return p;
  }
  throw ConfigError(fmt::format("unknown protocol '{}'", name));
}

inline bool is_kitaev(Protocol p) { return p == Protocol::kitaev_probe || p == Protocol::kitaev_probe_detuned; }
inline bool is_tight_binding(Protocol p) { return p == Protocol::release_particle || p == Protocol::barrier_removal; }

/// Everything needed to reproduce a run. Fields irrelevant to the chosen
/// protocol are ignored. Region sizes l_X, l_P of 0 mean "use the default".
struct QuenchConfig {
  Protocol protocol = Protocol::release_particle;

  Index sites = 201;         ///< N, tight-binding protocols
  Index lq = 10;             ///< Kitaev chain length
  Index probe_length = 110;  ///< tight-binding probe length (Kitaev and effective protocols)
  Index lx = 0;
  Index lp = 0;

  double mu_i = -20.0;  ///< pre-quench chemical potential on the barrier/well sites
  double mu_f = 20.0;   ///< post-quench chemical potential on the same sites
  double mu_p = 20.0;   ///< chemical potential of the remaining chain (or of the probe)
  double tau = 20.0;
  double tau_p = 1.0;
  double tau_t = 1.0;
  double mu = 0.0;  ///< Kitaev chemical potential (detuned protocol)
  Index barrier_width = 1;
  double mu_p_regularizer = 1e-5;  ///< replaces mu_p = 0 in barrier_removal to lift the half-filling degeneracy

  double t_start = 0.0;
  double t_stop = 80.0;
  double dt = 0.5;
  std::vector<double> times;  ///< explicit grid; overrides t_start/t_stop/dt when nonempty

  std::vector<double> snapshot_times;
  std::vector<double> profile_times;
  std::vector<LatticeCoord> tracked;

  std::optional<FitWindow> decay_window;
  std::optional<FitWindow> profile_window;
  bool baseline_lattice = true;
  bool compare_effective = false;

  bool operator==(const QuenchConfig&) const = default;

  Index total_sites() const {
    if (is_kitaev(protocol)) return lq + probe_length;
    if (protocol == Protocol::effective_model) return probe_length + 1;
    return sites;
  }

  /// Center of the barrier or well, floor((N - 1) / 2).
  Index eta() const { return (sites - 1) / 2; }

  std::set<Index> barrier_sites() const {
    std::set<Index> out;
    const Index half = barrier_width / 2;
    for (Index s = eta() - half; s <= eta() + half; ++s) out.insert(s);
    return out;
  }

  /// Q is the Kitaev chain, the effective site, or the left half including eta.
  RegionSpec regions() const {
    const Index n = total_sites();
    Index q = 0;
    if (is_kitaev(protocol)) {
      q = lq;
    } else if (protocol == Protocol::effective_model) {
      q = 1;
    } else {
      q = eta() + 1;
    }
    const Index x = lx > 0 ? lx : std::min<Index>(10, std::max<Index>(1, (n - q) / 2));
    const Index p = lp > 0 ? lp : n - q - x;
    return {q, x, p};
  }

  std::vector<double> time_grid() const {
    if (!times.empty()) return times;
    std::vector<double> grid;
    const auto steps = static_cast<long>(std::floor((t_stop - t_start) / dt + 1e-9));
    for (long k = 0; k <= steps; ++k) grid.push_back(t_start + static_cast<double>(k) * dt);
    return grid;
  }

  /// Effective mu_p: barrier_removal with mu_p == 0 uses the regularizer.
  double effective_mu_p() const {
    if (protocol == Protocol::barrier_removal && mu_p == 0.0) return mu_p_regularizer;
    return mu_p;
  }

  void validate() const {
    const Index n = total_sites();
    if (is_tight_binding(protocol)) {
      if (sites < 3) throw ConfigError(fmt::format("N must be at least 3, got {}", sites));
      if (barrier_width < 1 || barrier_width % 2 == 0) {
        throw ConfigError(fmt::format("barrier_width must be odd and positive, got {}", barrier_width));
      }
      if (eta() - barrier_width / 2 < 0 || eta() + barrier_width / 2 >= sites) {
        throw ConfigError(fmt::format("barrier of width {} does not fit around site {}", barrier_width, eta()));
      }
    }
    if (is_kitaev(protocol) && lq < 2) throw ConfigError(fmt::format("l_Q must be at least 2, got {}", lq));
    if ((is_kitaev(protocol) || protocol == Protocol::effective_model) && probe_length < 2) {
      throw ConfigError(fmt::format("probe_length must be at least 2, got {}", probe_length));
    }
    if (lx < 0 || lp < 0) throw ConfigError("l_X and l_P must be nonnegative");
    try {
      regions().validate(n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (times.empty() && !(dt > 0.0)) throw ConfigError(fmt::format("dt must be positive, got {}", dt));
    if (times.empty() && t_stop < t_start) throw ConfigError("t_stop is before t_start");
    const auto grid = time_grid();
    if (grid.empty()) throw ConfigError("empty time grid");
    for (std::size_t k = 1; k < grid.size(); ++k) {
      if (!(grid[k] > grid[k - 1])) throw ConfigError("time grid must be strictly increasing");
    }
    for (double t : grid) {
      if (!std::isfinite(t)) throw ConfigError("non-finite time in grid");
    }
    for (double t : snapshot_times) {
      if (!std::isfinite(t) || t < 0) throw ConfigError(fmt::format("invalid snapshot time {}", t));
    }
    for (double t : profile_times) {
      if (!std::isfinite(t) || t < 0) throw ConfigError(fmt::format("invalid profile time {}", t));
    }
    for (const auto& c : tracked) {
      if (c.ell < 0 || c.m < 0 || c.m + c.ell >= n) {
        throw ConfigError(fmt::format("tracked coordinate (ell={}, m={}) outside a chain of {}", c.ell, c.m, n));
      }
    }
    for (double v : {mu_i, mu_f, mu_p, tau, tau_p, tau_t, mu, mu_p_regularizer}) {
      if (!std::isfinite(v)) throw ConfigError("non-finite Hamiltonian parameter");
    }
  }
};

/// Paper parameters for each protocol; unspecified config keys fall back to these.
inline QuenchConfig default_config(Protocol p) {
  QuenchConfig c;
  c.protocol = p;
  switch (p) {
    case Protocol::release_particle:
      c.sites = 201;
      c.mu_i = -20.0;
      c.mu_f = 20.0;
      c.mu_p = 20.0;
      c.t_stop = 80.0;
      break;
    case Protocol::barrier_removal:
      c.sites = 201;
      c.mu_i = 20.0;
      c.mu_f = 0.0;
      c.mu_p = 0.0;
      c.t_stop = 150.0;
      break;
    case Protocol::kitaev_probe:
      c.lq = 10;
      c.probe_length = 110;
      c.tau = 20.0;
      c.mu_p = 0.0;
      c.t_stop = 120.0;
      c.tracked = {{2, 8}};
      break;
    case Protocol::kitaev_probe_detuned:
      c.lq = 30;
      c.probe_length = 70;
      c.tau = 100.0;
      c.mu = 60.0;
      c.mu_p = 0.0;
      c.t_stop = 80.0;
      break;
    case Protocol::effective_model:
      c.probe_length = 110;
      c.mu_p = 0.0;
      c.t_stop = 120.0;
      break;
  }
  return c;
}

/// Pre- and post-quench Hamiltonians plus the rule for preparing the ground state.
struct QuenchSetup {
  CouplingMatrix pre;
  CouplingMatrix post;
  GroundStateOptions options;
};

inline QuenchSetup build_quench(const QuenchConfig& c) {
  c.validate();
  QuenchSetup s;
  switch (c.protocol) {
    case Protocol::release_particle:
    case Protocol::barrier_removal: {
      const double mu_p = c.effective_mu_p();
      const auto special = c.barrier_sites();
      s.pre = build_tb_hamiltonian(c.sites, special, c.mu_i, mu_p, c.tau_p);
      s.post = build_tb_hamiltonian(c.sites, special, c.mu_f, mu_p, c.tau_p);
      s.options.policy = DegeneracyPolicy::error;
      break;
    }
    case Protocol::kitaev_probe:
    case Protocol::kitaev_probe_detuned: {
      const auto kitaev = build_kitaev_with_mu(c.lq, c.tau, c.protocol == Protocol::kitaev_probe ? 0.0 : c.mu);
      const auto probe = build_tb_hamiltonian(c.probe_length, {}, 0.0, c.mu_p, c.tau_p);
      s.pre = build_composite(kitaev, probe, 0.0);
      s.post = build_composite(kitaev, probe, c.tau_t);
      s.options.policy = DegeneracyPolicy::occupy_zero_modes_empty;
      break;
    }
    case Protocol::effective_model:
      s.pre = build_effective_hamiltonian(c.probe_length + 1, 0.0, c.tau_p, c.mu_p);
      s.post = build_effective_hamiltonian(c.probe_length + 1, c.tau_t, c.tau_p, c.mu_p);
      s.options.policy = DegeneracyPolicy::occupy_zero_modes_empty;
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------

struct Snapshot {
  double t = 0.0;
  InformationLattice lattice;
  std::optional<TriangularArray> delta;
  double seconds = 0.0;
};

struct InterfaceProfile {
  double t = 0.0;
  std::vector<double> values;  ///< i(ell, l_Q - 1) for ell = 1 .. N - l_Q
};

struct NamedFit {
  std::string name;
  FitResult fit;
};

struct RunResult {
  QuenchConfig config;
  RegionSpec regions;
  std::vector<double> times;

  std::optional<InformationLattice> baseline;
  double baseline_seconds = 0.0;
  PartitionSums baseline_sums{};
  double baseline_interface = 0.0;
  double baseline_diagonal = 0.0;
  double baseline_top = 0.0;

  GammaSeries gamma;
  std::vector<std::vector<double>> occupation;  ///< [time][site]
  std::vector<double> interface;
  std::vector<double> diagonal;
  std::vector<double> top_info;
  std::vector<double> total_info;
  std::vector<std::vector<double>> tracked;  ///< [time][k] for config.tracked[k]

  std::vector<Snapshot> snapshots;
  std::vector<InterfaceProfile> profiles;
  std::vector<NamedFit> fits;

  const FitResult* find_fit(std::string_view name) const {
    for (const auto& f : fits) {
      if (f.name == name) return &f.fit;
    }
    return nullptr;
  }
};

/// Mean of the series over the final 10% of the time window.
inline double asymptote(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.empty() || times.size() != values.size()) throw std::invalid_argument("asymptote: bad series");
  const double from = times.back() - 0.1 * (times.back() - times.front());
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= from) {
      sum += values[k];
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

namespace detail {

struct TimeSample {
  PartitionSums sums{};
  std::vector<double> occupation;
  double interface = 0.0;
  double diagonal = 0.0;
  double top = 0.0;
  double total = 0.0;
  std::vector<double> tracked;
};

inline TimeSample sample(const CovarianceMatrix& m, const RegionSpec& r, const std::vector<LatticeCoord>& tracked) {
  const EntropyTable table(m);
  TimeSample s;
  s.sums = partition_sums_from_information(table, r);
  s.occupation = occupation_density(m);
  s.interface = interface_sum_telescoped(table, r);
  s.diagonal = diagonal_sum_telescoped(table, r.q);
  s.top = top_information(table, r.q);
  s.total = table.information(m.sites() - 1, 0);
  for (const auto& c : tracked) s.tracked.push_back(table.local_information(c.ell, c.m));
  return s;
}

inline std::vector<double> ell_axis(std::size_t n, double first) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = first + static_cast<double>(k);
  return x;
}

}  // namespace detail

/// The fits reported for a run: Gaussian decay of the edge information (Kitaev
/// and effective protocols), power law of the latest interface profile, and
/// power law of the pre-quench left half-chain (barrier removal).
inline std::vector<NamedFit> standard_fits(const QuenchConfig& config, const std::vector<double>& times,
                                           const std::vector<double>& top_info,
                                           const std::vector<InterfaceProfile>& profiles,
                                           const InformationLattice* baseline) {
  std::vector<NamedFit> fits;
  auto attempt = [&](std::string name, FitModel model, std::optional<FitWindow> window, auto&& fit) {
    try {
      fits.push_back({std::move(name), fit()});
    } catch (const NumericError& e) {
      FitResult failed;
      failed.model = model;
      if (window) failed.window = *window;
      failed.flagged = true;
      failed.note = e.what();
      fits.push_back({std::move(name), failed});
    }
  };
  if (is_kitaev(config.protocol) || config.protocol == Protocol::effective_model) {
    attempt("top_information_decay", FitModel::gaussian_decay, config.decay_window,
            [&] { return fit_gaussian_decay(times, top_info, config.decay_window); });
  }
  if (!profiles.empty()) {
    const auto& last = profiles.back();
    const auto x = detail::ell_axis(last.values.size(), 1.0);
    const FitWindow w = config.profile_window.value_or(default_power_law_window(last.values.size()));
    attempt("interface_profile_power_law", FitModel::power_law, w, [&] { return fit_power_law(x, last.values, w); });
  }
  if (config.protocol == Protocol::barrier_removal && baseline) {
    // left critical half, sites [0, eta - width / 2)
    const Index half = config.eta() - config.barrier_width / 2;
    const auto profile = scale_profile(*baseline, 0, half);
    const auto x = detail::ell_axis(profile.size(), 0.0);
    const FitWindow w = config.profile_window.value_or(default_power_law_window(profile.size()));
    attempt("baseline_profile_power_law", FitModel::power_law, w, [&] { return fit_power_law(x, profile, w); });
  }
  return fits;
}

/// Executes a quench. Results do not depend on the worker count.
inline RunResult run(const QuenchConfig& config, int workers = 1) {
  using clock = std::chrono::steady_clock;
  const QuenchSetup setup = build_quench(config);
  RunResult out;
  out.config = config;
  out.regions = config.regions();
  out.times = config.time_grid();
  const RegionSpec& r = out.regions;

  const CovarianceMatrix initial = ground_state(setup.pre, setup.options);
  {
    const EntropyTable table(initial);
    out.baseline_sums = partition_sums_from_information(table, r);
    out.baseline_interface = interface_sum_telescoped(table, r);
    out.baseline_diagonal = diagonal_sum_telescoped(table, r.q);
    out.baseline_top = top_information(table, r.q);
  }
  if (config.baseline_lattice || !config.snapshot_times.empty()) {
    const auto t0 = clock::now();
    out.baseline = local_information(initial, workers);
    out.baseline_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  }

  const Evolver evolver(setup.post, initial);

  std::vector<detail::TimeSample> samples(out.times.size());
  parallel_for(out.times.size(), workers,
               [&](std::size_t k) { samples[k] = detail::sample(evolver.evolve(out.times[k]), r, config.tracked); });

  for (auto p : all_partitions) out.gamma[p].reserve(samples.size());
  for (const auto& s : samples) {
    for (auto p : all_partitions) out.gamma[p].push_back(s.sums[slot(p)] - out.baseline_sums[slot(p)]);
    out.occupation.push_back(s.occupation);
    out.interface.push_back(s.interface);
    out.diagonal.push_back(s.diagonal);
    out.top_info.push_back(s.top);
    out.total_info.push_back(s.total);
    out.tracked.push_back(s.tracked);
  }

  for (double t : config.snapshot_times) {
    Snapshot snap;
    snap.t = t;
    const auto t0 = clock::now();
    snap.lattice = local_information(evolver.evolve(t), workers);
    snap.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (out.baseline) snap.delta = lattice_delta(snap.lattice, *out.baseline);
    out.profiles.push_back({t, interface_profile(snap.lattice, r)});
    out.snapshots.push_back(std::move(snap));
  }
  for (double t : config.profile_times) {
    const auto m = evolver.evolve(t);
    const EntropyTable table(m);
    out.profiles.push_back({t, interface_profile(table, r)});
  }
  std::stable_sort(out.profiles.begin(), out.profiles.end(),
                   [](const InterfaceProfile& a, const InterfaceProfile& b) { return a.t < b.t; });

  out.fits = standard_fits(config, out.times, out.top_info, out.profiles, out.baseline ? &*out.baseline : nullptr);
  return out;
}

// ---------------------------------------------------------------------------
// Full Kitaev-probe run versus the single-site effective model

/// Effective-model config matching a Kitaev-probe config: same probe, grid and
/// X/P split, with Q reduced to the single delocalized site.
inline QuenchConfig effective_counterpart(const QuenchConfig& full) {
  if (!is_kitaev(full.protocol)) throw ConfigError("effective comparison needs a Kitaev-probe run");
  QuenchConfig eff = full;
  eff.protocol = Protocol::effective_model;
  const RegionSpec r = full.regions();
  eff.lx = r.x;
  eff.lp = r.p;
  eff.snapshot_times.clear();
  eff.profile_times.clear();
  eff.tracked.clear();
  eff.baseline_lattice = false;
  eff.compare_effective = false;
  return eff;
}

struct EffectiveComparison {
  double max_interface_deviation = 0.0;
  double max_diagonal_deviation = 0.0;
  PartitionSums max_gamma_deviation{};
  PartitionSums asymptote_full{};
  PartitionSums asymptote_effective{};
  PartitionSums asymptote_deviation{};
};

/// In the effective model the site f holds both edge Majoranas, so its
/// interface diagonal carries the correlations of gamma_L and gamma_R alike.
/// The full run's interface (gamma_R side) is compared with half of it, and its
/// edge diagonal with the effective diagonal minus that half. Gamma series are
/// compared directly.
inline EffectiveComparison compare_effective(const RunResult& full, const RunResult& eff) {
  if (full.times != eff.times) throw std::invalid_argument("compare_effective: time grids differ");
  EffectiveComparison c;
  for (std::size_t k = 0; k < full.times.size(); ++k) {
    const double half = 0.5 * eff.interface[k];
    c.max_interface_deviation = std::max(c.max_interface_deviation, std::abs(full.interface[k] - half));
    c.max_diagonal_deviation = std::max(c.max_diagonal_deviation, std::abs(full.diagonal[k] - (eff.diagonal[k] - half)));
    for (auto p : all_partitions) {
      auto& dev = c.max_gamma_deviation[slot(p)];
      dev = std::max(dev, std::abs(full.gamma.at(p)[k] - eff.gamma.at(p)[k]));
    }
  }
  for (auto p : all_partitions) {
    c.asymptote_full[slot(p)] = asymptote(full.times, full.gamma.at(p));
    c.asymptote_effective[slot(p)] = asymptote(eff.times, eff.gamma.at(p));
    c.asymptote_deviation[slot(p)] = std::abs(c.asymptote_full[slot(p)] - c.asymptote_effective[slot(p)]);
  }
  return c;
}

}  // namespace infolat
