#pragma once

// Information lattice: subsystem entropies S(ell, m) of every contiguous block
// of ell + 1 sites starting at site m, the local information i(ell, m), region
// partitions, and the sums read off from them.
//
// Coordinates are stored by (scale ell, leftmost site m). The center label
// n = m + ell / 2 is only produced for output, as the integer two_n = 2m + ell.

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "infolat/entropy.hpp"
#include "infolat/gaussian.hpp"
#include "infolat/parallel.hpp"

namespace infolat {

struct LatticeCoord {
  Index ell = 0;
  Index m = 0;

  constexpr Index two_n() const { return 2 * m + ell; }
  constexpr double center() const { return static_cast<double>(m) + 0.5 * static_cast<double>(ell); }
  constexpr Index last_site() const { return m + ell; }
  bool operator==(const LatticeCoord&) const = default;
};

/// Values on the triangle 0 <= ell < N, 0 <= m < N - ell. Row ell is contiguous.
class TriangularArray {
 public:
  TriangularArray() = default;
  explicit TriangularArray(Index sites, double fill = 0.0)
      : sites_(sites), data_(static_cast<std::size_t>(sites * (sites + 1) / 2), fill) {}

  Index sites() const { return sites_; }
  std::size_t size() const { return data_.size(); }
  bool contains(Index ell, Index m) const { return ell >= 0 && ell < sites_ && m >= 0 && m + ell < sites_; }

  double& operator()(Index ell, Index m) { return data_[offset(ell, m)]; }
  double operator()(Index ell, Index m) const { return data_[offset(ell, m)]; }
  double& operator[](LatticeCoord c) { return (*this)(c.ell, c.m); }
  double operator[](LatticeCoord c) const { return (*this)(c.ell, c.m); }

  const std::vector<double>& values() const { return data_; }

  /// Sum in storage order (ell ascending, then m ascending), independent of
  /// how the entries were computed.
  double sum() const {
    double total = 0.0;
    for (double v : data_) total += v;
    return total;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (Index ell = 0; ell < sites_; ++ell) {
      for (Index m = 0; m + ell < sites_; ++m) fn(LatticeCoord{ell, m}, (*this)(ell, m));
    }
  }

 private:
  std::size_t offset(Index ell, Index m) const {
    return static_cast<std::size_t>(ell * sites_ - ell * (ell - 1) / 2 + m);
  }

  Index sites_ = 0;
  std::vector<double> data_;
};

/// Von Neumann information I = (ell + 1) - S of every subsystem and the local
/// information decomposing it.
class InformationLattice {
 public:
  InformationLattice() = default;

  /// Applies i(ell, m) = I(ell, m) - I(ell-1, m) - I(ell-1, m+1) + I(ell-2, m+1)
  /// with I of empty subsystems equal to zero.
  static InformationLattice from_entropies(TriangularArray entropies) {
    InformationLattice lat;
    const Index n = entropies.sites();
    lat.entropy_ = std::move(entropies);
    lat.local_ = TriangularArray(n);
    for (Index ell = 0; ell < n; ++ell) {
      for (Index m = 0; m + ell < n; ++m) {
        double value = lat.information(ell, m);
        if (ell >= 1) value -= lat.information(ell - 1, m) + lat.information(ell - 1, m + 1);
        if (ell >= 2) value += lat.information(ell - 2, m + 1);
        lat.local_(ell, m) = value;
      }
    }
    lat.total_ = lat.local_.sum();
    return lat;
  }

  Index sites() const { return entropy_.sites(); }
  double entropy(Index ell, Index m) const { return entropy_(ell, m); }
  double information(Index ell, Index m) const { return static_cast<double>(ell + 1) - entropy_(ell, m); }
  double local_information(Index ell, Index m) const { return local_(ell, m); }
  double local_information(LatticeCoord c) const { return local_[c]; }
  const TriangularArray& entropies() const { return entropy_; }
  const TriangularArray& local() const { return local_; }
  double total_information() const { return total_; }

  double min_local_information() const {
    double lo = std::numeric_limits<double>::infinity();
    for (double v : local_.values()) lo = std::min(lo, v);
    return lo;
  }

 private:
  TriangularArray entropy_;
  TriangularArray local_;
  double total_ = 0.0;
};

/// Entropy of every contiguous subsystem, one eigenproblem per coordinate,
/// distributed over `workers` threads. Output is independent of worker count.
inline TriangularArray subsystem_entropies(const CovarianceMatrix& m, int workers = 1,
                                           const SpectrumTolerance& tol = {}) {
  const Index n = m.sites();
  TriangularArray s(n);
  // Largest subsystems first so the tail of the schedule is cheap.
  std::vector<LatticeCoord> order;
  order.reserve(s.size());
  for (Index ell = n - 1; ell >= 0; --ell) {
    for (Index first = 0; first + ell < n; ++first) order.push_back({ell, first});
  }
  parallel_for(order.size(), workers, [&](std::size_t k) {
    const auto c = order[k];
    s(c.ell, c.m) = block_entropy(m, c.m, c.ell + 1, tol);
  });
  return s;
}

inline double subsystem_entropy(const CovarianceMatrix& m, LatticeCoord c, const SpectrumTolerance& tol = {}) {
  if (c.ell < 0 || c.m < 0 || c.m + c.ell >= m.sites()) {
    throw std::out_of_range(fmt::format("lattice coordinate (ell={}, m={}) outside a chain of {}", c.ell, c.m, m.sites()));
  }
  return block_entropy(m, c.m, c.ell + 1, tol);
}

inline InformationLattice local_information(const CovarianceMatrix& m, int workers = 1,
                                            const SpectrumTolerance& tol = {}) {
  return InformationLattice::from_entropies(subsystem_entropies(m, workers, tol));
}

/// Lazily evaluated entropies of one covariance matrix, for observables that
/// need only a few subsystems. Not thread-safe.
class EntropyTable {
 public:
  explicit EntropyTable(const CovarianceMatrix& m, SpectrumTolerance tol = {})
      : m_(&m), cache_(m.sites(), std::numeric_limits<double>::quiet_NaN()), tol_(tol) {}

  Index sites() const { return m_->sites(); }

  double entropy(Index ell, Index m) const {
    double& slot = cache_(ell, m);
    if (std::isnan(slot)) slot = block_entropy(*m_, m, ell + 1, tol_);
    return slot;
  }
  /// I(ell, m), zero for ell < 0.
  double information(Index ell, Index m) const {
    if (ell < 0) return 0.0;
    return static_cast<double>(ell + 1) - entropy(ell, m);
  }
  double local_information(Index ell, Index m) const {
    double value = information(ell, m);
    if (ell >= 1) value -= information(ell - 1, m) + information(ell - 1, m + 1);
    if (ell >= 2) value += information(ell - 2, m + 1);
    return value;
  }

 private:
  const CovarianceMatrix* m_;
  mutable TriangularArray cache_;
  SpectrumTolerance tol_;
};

// ---------------------------------------------------------------------------
// Partitions

/// Three consecutive regions Q | X | P covering the chain.
struct RegionSpec {
  Index q = 0;
  Index x = 0;
  Index p = 0;

  Index sites() const { return q + x + p; }
  void validate(Index expected_sites) const {
    if (q <= 0 || x <= 0 || p <= 0) {
      throw std::invalid_argument(fmt::format("regions must be nonempty, got l_Q={}, l_X={}, l_P={}", q, x, p));
    }
    if (sites() != expected_sites) {
      throw std::invalid_argument(
          fmt::format("regions l_Q + l_X + l_P = {} do not cover N = {}", sites(), expected_sites));
    }
  }
  bool operator==(const RegionSpec&) const = default;
};

enum class Partition { Qbar, Xbar, Pbar, QX, XP, QXP };
inline constexpr std::array<Partition, 6> all_partitions{Partition::Qbar, Partition::Xbar, Partition::Pbar,
                                                         Partition::QX,   Partition::XP,   Partition::QXP};

inline constexpr std::string_view partition_name(Partition p) {
  switch (p) {
    case Partition::Qbar: return "Qbar";
    case Partition::Xbar: return "Xbar";
    case Partition::Pbar: return "Pbar";
    case Partition::QX: return "QX";
    case Partition::XP: return "XP";
    case Partition::QXP: return "QXP";
  }
  return "?";
}

inline Partition partition_from_name(std::string_view name) {
  for (auto p : all_partitions) {
    if (partition_name(p) == name) return p;
  }
  throw std::invalid_argument(fmt::format("unknown partition '{}'", name));
}

using PartitionSums = std::array<double, 6>;

inline constexpr std::size_t slot(Partition p) { return static_cast<std::size_t>(p); }

/// Which partition the subsystem [m, m + ell] belongs to.
inline Partition classify(LatticeCoord c, const RegionSpec& r) {
  const Index lo = c.m;
  const Index hi = c.m + c.ell;
  const Index x_begin = r.q;
  const Index p_begin = r.q + r.x;
  if (hi < x_begin) return Partition::Qbar;
  if (lo >= p_begin) return Partition::Pbar;
  if (lo >= x_begin && hi < p_begin) return Partition::Xbar;
  if (lo < x_begin && hi >= p_begin) return Partition::QXP;
  if (lo < x_begin) return Partition::QX;
  return Partition::XP;
}

/// Sum of local information inside each partition, by direct summation.
inline PartitionSums partition_sums(const InformationLattice& lat, const RegionSpec& r) {
  r.validate(lat.sites());
  PartitionSums sums{};
  lat.local().for_each([&](LatticeCoord c, double v) { sums[slot(classify(c, r))] += v; });
  return sums;
}

/// The same sums from six region entropies: summing local information over all
/// subsystems inside a region gives that region's information, so
/// Qbar = I(Q), QX = I(QX) - I(Q) - I(X), QXP = I(QXP) - I(QX) - I(XP) + I(X).
template <class Source>
PartitionSums partition_sums_from_information(const Source& src, const RegionSpec& r) {
  r.validate(src.sites());
  const double iq = src.information(r.q - 1, 0);
  const double ix = src.information(r.x - 1, r.q);
  const double ip = src.information(r.p - 1, r.q + r.x);
  const double iqx = src.information(r.q + r.x - 1, 0);
  const double ixp = src.information(r.x + r.p - 1, r.q);
  const double iall = src.information(r.sites() - 1, 0);
  PartitionSums sums{};
  sums[slot(Partition::Qbar)] = iq;
  sums[slot(Partition::Xbar)] = ix;
  sums[slot(Partition::Pbar)] = ip;
  sums[slot(Partition::QX)] = iqx - iq - ix;
  sums[slot(Partition::XP)] = ixp - ix - ip;
  sums[slot(Partition::QXP)] = iall - iqx - ixp + ix;
  return sums;
}

using GammaSeries = std::map<Partition, std::vector<double>>;

/// Gamma_Lambda(t) = sum over Lambda of [i_t - i_baseline] for every lattice in the series.
inline GammaSeries gamma(const std::vector<InformationLattice>& lattices, const InformationLattice& baseline,
                         const RegionSpec& r) {
  const PartitionSums base = partition_sums(baseline, r);
  GammaSeries out;
  for (auto p : all_partitions) out[p].reserve(lattices.size());
  for (const auto& lat : lattices) {
    if (lat.sites() != baseline.sites()) {
      throw std::invalid_argument(
          fmt::format("gamma: lattice has {} sites, baseline {}", lat.sites(), baseline.sites()));
    }
    const PartitionSums now = partition_sums(lat, r);
    for (auto p : all_partitions) out[p].push_back(now[slot(p)] - base[slot(p)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interface and edge sums

/// Total local information on the diagonal of subsystems whose leftmost site
/// is the last site of Q: sum of i(ell, l_Q - 1) for ell = 1 .. N - l_Q.
template <class Source>
double interface_sum(const Source& src, const RegionSpec& r) {
  r.validate(src.sites());
  double total = 0.0;
  for (Index ell = 1; ell <= src.sites() - r.q; ++ell) total += src.local_information(ell, r.q - 1);
  return total;
}

/// interface_sum telescoped to the mutual information between site l_Q - 1 and XP.
template <class Source>
double interface_sum_telescoped(const Source& src, const RegionSpec& r) {
  r.validate(src.sites());
  const Index n = src.sites();
  const Index a = r.q - 1;
  return src.information(n - r.q, a) - src.information(0, a) - src.information(n - r.q - 1, r.q);
}

/// Local information on the left-edge diagonal from scale l_Q - 1 to the top:
/// sum of i(ell, 0) for ell = l_Q - 1 .. N - 1.
template <class Source>
double diagonal_sum_topological(const Source& src, Index lq) {
  if (lq < 1 || lq > src.sites()) throw std::invalid_argument(fmt::format("diagonal sum: l_Q={} out of range", lq));
  double total = 0.0;
  for (Index ell = lq - 1; ell < src.sites(); ++ell) total += src.local_information(ell, 0);
  return total;
}

/// diagonal_sum_topological telescoped to four subsystem informations.
template <class Source>
double diagonal_sum_telescoped(const Source& src, Index lq) {
  const Index n = src.sites();
  if (lq < 1 || lq > n) throw std::invalid_argument(fmt::format("diagonal sum: l_Q={} out of range", lq));
  const Index a = lq - 1;
  auto info = [&](Index ell, Index m) { return ell < 0 ? 0.0 : src.information(ell, m); };
  double total = info(n - 1, 0) - info(a - 1, 0);
  if (n >= 2) total -= info(n - 2, 1) - info(a - 2, 1);
  return total;
}

/// Local information at the top of the Q triangle, i(l_Q - 1, 0).
template <class Source>
double top_information(const Source& src, Index lq) {
  return src.local_information(lq - 1, 0);
}

/// Mean local information per scale over the subsystems inside sites
/// [first, first + count).
inline std::vector<double> scale_profile(const InformationLattice& lat, Index first, Index count) {
  if (first < 0 || count < 1 || first + count > lat.sites()) {
    throw std::out_of_range(fmt::format("scale_profile: sites [{}, {}) outside {}", first, first + count, lat.sites()));
  }
  std::vector<double> profile(static_cast<std::size_t>(count), 0.0);
  for (Index ell = 0; ell < count; ++ell) {
    double total = 0.0;
    for (Index m = first; m + ell < first + count; ++m) total += lat.local_information(ell, m);
    profile[static_cast<std::size_t>(ell)] = total / static_cast<double>(count - ell);
  }
  return profile;
}

/// Mean local information at each scale.
inline std::vector<double> scale_profile(const InformationLattice& lat) { return scale_profile(lat, 0, lat.sites()); }

/// i(ell, l_Q - 1) for ell = 1 .. N - l_Q, indexed from ell = 1.
template <class Source>
std::vector<double> interface_profile(const Source& src, const RegionSpec& r) {
  std::vector<double> out;
  for (Index ell = 1; ell <= src.sites() - r.q; ++ell) out.push_back(src.local_information(ell, r.q - 1));
  return out;
}

/// Elementwise i_t - i_baseline.
inline TriangularArray lattice_delta(const InformationLattice& now, const InformationLattice& baseline) {
  if (now.sites() != baseline.sites()) {
    throw std::invalid_argument(fmt::format("lattice_delta: {} sites vs {}", now.sites(), baseline.sites()));
  }
  TriangularArray d(now.sites());
  now.local().for_each([&](LatticeCoord c, double v) { d[c] = v - baseline.local_information(c); });
  return d;
}

}  // namespace infolat
