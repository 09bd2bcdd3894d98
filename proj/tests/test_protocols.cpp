#include <gtest/gtest.h>

#include "infolat/protocols.hpp"
#include "infolat/validation.hpp"

using namespace infolat;

namespace {

QuenchConfig small_kitaev(double tau_t, double tau = 20.0) {
  auto c = default_config(Protocol::kitaev_probe);
  c.lq = 4;
  c.probe_length = 12;
  c.lx = 4;
  c.tau = tau;
  c.tau_t = tau_t;
  c.t_stop = 6.0;
  c.dt = 1.0;
  c.tracked = {{2, 2}, {0, 5}};
  return c;
}

QuenchConfig small_release() {
  auto c = default_config(Protocol::release_particle);
  c.sites = 31;
  c.lx = 5;
  c.t_stop = 12.0;
  c.dt = 1.5;
  return c;
}

}  // namespace

TEST(QuenchConfig, DefaultsAreValid) {
  for (auto p : all_protocols) {
    EXPECT_NO_THROW(default_config(p).validate()) << protocol_name(p);
    EXPECT_EQ(protocol_from_name(protocol_name(p)), p);
  }
  EXPECT_THROW(protocol_from_name("quench"), ConfigError);
}

TEST(QuenchConfig, DefaultRegions) {
  EXPECT_EQ(default_config(Protocol::release_particle).regions(), (RegionSpec{101, 10, 90}));
  EXPECT_EQ(default_config(Protocol::barrier_removal).regions(), (RegionSpec{101, 10, 90}));
  EXPECT_EQ(default_config(Protocol::kitaev_probe).regions(), (RegionSpec{10, 10, 100}));
  EXPECT_EQ(default_config(Protocol::effective_model).regions(), (RegionSpec{1, 10, 100}));
  auto c = default_config(Protocol::kitaev_probe);
  c.probe_length = 190;
  c.lx = 50;
  EXPECT_EQ(c.regions(), (RegionSpec{10, 50, 140}));
}

TEST(QuenchConfig, TimeGrid) {
  const auto grid = default_config(Protocol::release_particle).time_grid();
  ASSERT_EQ(grid.size(), 161u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.0);
  EXPECT_DOUBLE_EQ(grid.back(), 80.0);
  auto c = default_config(Protocol::release_particle);
  c.times = {0.0, 3.0, 7.5};
  EXPECT_EQ(c.time_grid(), c.times);
}

TEST(QuenchConfig, RejectsInvalidSettings) {
  auto expect_bad = [](auto mutate) {
    auto c = default_config(Protocol::release_particle);
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  expect_bad([](QuenchConfig& c) { c.barrier_width = 2; });
  expect_bad([](QuenchConfig& c) { c.barrier_width = 203; });
  expect_bad([](QuenchConfig& c) { c.lx = 50, c.lp = 10; });
  expect_bad([](QuenchConfig& c) { c.times = {0.0, 2.0, 1.0}; });
  expect_bad([](QuenchConfig& c) { c.dt = 0.0; });
  expect_bad([](QuenchConfig& c) { c.tracked = {{5, 200}}; });
  expect_bad([](QuenchConfig& c) { c.snapshot_times = {-1.0}; });
  expect_bad([](QuenchConfig& c) { c.sites = 2; });
  auto k = default_config(Protocol::kitaev_probe);
  k.lq = 1;
  EXPECT_THROW(k.validate(), ConfigError);
}

TEST(QuenchConfig, BarrierPlacementAndRegularizer) {
  auto c = default_config(Protocol::barrier_removal);
  c.barrier_width = 11;
  const auto sites = c.barrier_sites();
  EXPECT_EQ(*sites.begin(), 95);
  EXPECT_EQ(*sites.rbegin(), 105);
  EXPECT_EQ(c.effective_mu_p(), 1e-5);
  c.mu_p = 0.3;
  EXPECT_EQ(c.effective_mu_p(), 0.3);
  EXPECT_EQ(default_config(Protocol::release_particle).effective_mu_p(), 20.0);
}

TEST(Quench, KitaevPreQuenchIsDecoupled) {
  const auto setup = build_quench(small_kitaev(1.0));
  // no coupling between the chain (sites 0..3) and the probe before the quench
  EXPECT_EQ(setup.pre.matrix().block(0, 8, 8, 24).norm(), 0.0);
  EXPECT_GT(setup.post.matrix().block(0, 8, 8, 24).norm(), 0.0);
}

TEST(Quench, DecoupledKitaevIsStationary) {
  const auto r = run(small_kitaev(0.0));
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    for (auto p : all_partitions) EXPECT_NEAR(r.gamma.at(p)[k], 0.0, 1e-10);
    EXPECT_NEAR(r.interface[k], 0.0, 1e-10);
    EXPECT_NEAR(r.diagonal[k], 1.0, 1e-10);
    EXPECT_NEAR(r.top_info[k], 1.0, 1e-10);
    for (std::size_t s = 0; s < r.occupation[k].size(); ++s) EXPECT_NEAR(r.occupation[k][s], r.occupation[0][s], 1e-10);
    for (std::size_t c = 0; c < r.tracked[k].size(); ++c) EXPECT_NEAR(r.tracked[k][c], r.tracked[0][c], 1e-10);
  }
}

TEST(Quench, ReleaseConservesInformationAndParticles) {
  const auto r = run(small_release());
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    EXPECT_NEAR(r.total_info[k], 31.0, 1e-8 * 31);
    double gamma_total = 0.0, particles = 0.0;
    for (auto p : all_partitions) gamma_total += r.gamma.at(p)[k];
    for (double n : r.occupation[k]) particles += n;
    EXPECT_NEAR(gamma_total, 0.0, 1e-8 * 31);
    EXPECT_NEAR(particles, 1.0, 1e-9);
  }
  // the particle starts in the well
  EXPECT_GT(r.occupation[0][15], 0.99);
}

TEST(Quench, TelescopedSeriesMatchSnapshotLattices) {
  auto c = small_kitaev(1.0);
  c.snapshot_times = {2.0, 5.0};
  const auto r = run(c);
  ASSERT_TRUE(r.baseline.has_value());
  const auto base = partition_sums(*r.baseline, r.regions);
  for (std::size_t s = 0; s < r.snapshots.size(); ++s) {
    const auto& snap = r.snapshots[s];
    const std::size_t k = static_cast<std::size_t>(snap.t);  // dt = 1 from 0
    ASSERT_DOUBLE_EQ(r.times[k], snap.t);
    const auto now = partition_sums(snap.lattice, r.regions);
    for (auto p : all_partitions) EXPECT_NEAR(r.gamma.at(p)[k], now[slot(p)] - base[slot(p)], 1e-10);
    EXPECT_NEAR(r.interface[k], interface_sum(snap.lattice, r.regions), 1e-10);
    EXPECT_NEAR(r.diagonal[k], diagonal_sum_topological(snap.lattice, c.lq), 1e-10);
    EXPECT_NEAR(r.total_info[k], snap.lattice.total_information(), 1e-10);
    EXPECT_NEAR(r.tracked[k][0], snap.lattice.local_information(2, 2), 1e-10);
    ASSERT_TRUE(snap.delta.has_value());
    EXPECT_NEAR(snap.delta->sum(), 0.0, 1e-9);
  }
  // profiles from snapshots, in time order
  ASSERT_EQ(r.profiles.size(), 2u);
  EXPECT_EQ(r.profiles[0].t, 2.0);
  EXPECT_EQ(r.profiles[1].values, interface_profile(r.snapshots[1].lattice, r.regions));
}

TEST(Quench, ResultsIndependentOfWorkers) {
  auto c = small_kitaev(1.0);
  c.snapshot_times = {3.0};
  const auto a = run(c, 1);
  const auto b = run(c, 3);
  for (auto p : all_partitions) EXPECT_EQ(a.gamma.at(p), b.gamma.at(p));
  EXPECT_EQ(a.occupation, b.occupation);
  EXPECT_EQ(a.interface, b.interface);
  EXPECT_EQ(a.tracked, b.tracked);
  EXPECT_EQ(a.snapshots[0].lattice.local().values(), b.snapshots[0].lattice.local().values());
}

TEST(Quench, DegenerateTightBindingFails) {
  auto c = default_config(Protocol::release_particle);
  c.sites = 21;  // odd uniform chain: a zero-energy mode
  c.mu_i = 0.0;
  c.mu_p = 0.0;
  c.lx = 5;
  EXPECT_THROW(run(c), DegenerateGroundStateError);
  auto b = default_config(Protocol::barrier_removal);
  b.sites = 21;
  b.lx = 5;
  EXPECT_NO_THROW(build_quench(b));
}

TEST(Quench, StandardFits) {
  auto c = small_kitaev(1.0);
  c.dt = 0.25;
  const auto r = run(c);
  const auto* decay = r.find_fit("top_information_decay");
  ASSERT_NE(decay, nullptr);
  EXPECT_GT(decay->parameter, 0.0);
  EXPECT_EQ(r.find_fit("interface_profile_power_law"), nullptr);  // no profiles requested
}

TEST(Effective, CounterpartKeepsProbeAndRegions) {
  const auto full = default_config(Protocol::kitaev_probe);
  const auto eff = effective_counterpart(full);
  EXPECT_EQ(eff.protocol, Protocol::effective_model);
  EXPECT_EQ(eff.total_sites(), 111);
  EXPECT_EQ(eff.regions(), (RegionSpec{1, 10, 100}));
  EXPECT_EQ(eff.time_grid(), full.time_grid());
  EXPECT_THROW(effective_counterpart(default_config(Protocol::release_particle)), ConfigError);
}

TEST(Effective, DecoupledModelsAgreeExactly) {
  const auto full = small_kitaev(0.0);
  const auto c = compare_effective(run(full), run(effective_counterpart(full)));
  EXPECT_NEAR(c.max_interface_deviation, 0.0, 1e-10);
  EXPECT_NEAR(c.max_diagonal_deviation, 0.0, 1e-10);
  for (auto p : all_partitions) EXPECT_NEAR(c.max_gamma_deviation[slot(p)], 0.0, 1e-10);
}

TEST(Effective, DeviationShrinksWithGap) {
  auto at = [](double tau) {
    auto full = small_kitaev(1.0, tau);
    full.lq = 6;
    full.probe_length = 30;
    full.lx = 8;
    full.t_stop = 20.0;
    return compare_effective(run(full), run(effective_counterpart(full)));
  };
  const auto low = at(20.0);
  const auto high = at(200.0);
  EXPECT_LT(high.max_interface_deviation, low.max_interface_deviation);
  for (auto p : {Partition::Qbar, Partition::QX, Partition::QXP}) {
    EXPECT_LT(high.max_gamma_deviation[slot(p)], low.max_gamma_deviation[slot(p)]) << partition_name(p);
  }
}

TEST(Effective, GridMismatchRejected) {
  const auto full = small_kitaev(1.0);
  auto eff = effective_counterpart(full);
  eff.dt = 0.5;
  EXPECT_THROW(compare_effective(run(full), run(eff)), std::invalid_argument);
}

TEST(Asymptote, AveragesFinalTenPercent) {
  std::vector<double> t, y;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k);
    y.push_back(k >= 90 ? 2.0 : 0.0);
  }
  EXPECT_DOUBLE_EQ(asymptote(t, y), 2.0);
  EXPECT_THROW(asymptote({}, {}), std::invalid_argument);
}

TEST(Validation, OracleSuite) {
  const auto report = validation::run_suite(50);
  EXPECT_GE(report.cases.size(), 56u);
  EXPECT_LT(report.max_deviation(), 1e-8) << report.worst_case().name;
}
