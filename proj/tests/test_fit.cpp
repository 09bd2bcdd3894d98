#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "infolat/dynamics.hpp"
#include "infolat/fit.hpp"
#include "infolat/lattice.hpp"

using namespace infolat;

TEST(Fit, SyntheticGaussianDecay) {
  std::vector<double> t, y;
  for (int k = 0; k <= 40; ++k) {
    t.push_back(0.1 * k);
    y.push_back(std::exp(-0.5 * t.back() * t.back()));
  }
  const auto fit = fit_gaussian_decay(t, y);
  EXPECT_NEAR(fit.parameter, 0.5, 1e-6);
  EXPECT_FALSE(fit.flagged);
  // default window stops before y < 1e-3, i.e. t^2 < 2 ln 1000
  EXPECT_LE(fit.window.hi * fit.window.hi, 2 * std::log(1000.0));
  EXPECT_GT((fit.window.hi + 0.1) * (fit.window.hi + 0.1), 2 * std::log(1000.0));
}

TEST(Fit, ConstantSeriesIsFlagged) {
  const std::vector<double> t{0, 1, 2, 3}, y{0.4, 0.4, 0.4, 0.4};
  const auto fit = fit_gaussian_decay(t, y);
  EXPECT_NEAR(fit.parameter, 0.0, 1e-12);
  EXPECT_TRUE(fit.flagged);
}

TEST(Fit, GaussianDecayRejectsBadInput) {
  const std::vector<double> t{0, 1, 2}, y{1, 0.0, 0.1};
  EXPECT_THROW(fit_gaussian_decay(t, y, FitWindow{0, 2}), NumericError);
  EXPECT_THROW(fit_gaussian_decay(t, y, FitWindow{0, 5}), std::invalid_argument);
}

TEST(Fit, SyntheticPowerLaw) {
  std::vector<double> x, y;
  for (int ell = 1; ell <= 60; ++ell) {
    x.push_back(ell);
    y.push_back(3.0 * std::pow(ell, -2.0));
  }
  const auto fit = fit_power_law(x, y, default_power_law_window(x.size()));
  EXPECT_NEAR(fit.parameter, -2.0, 1e-6);
  EXPECT_EQ(fit.window.lo, 4.0);
  EXPECT_EQ(fit.window.hi, 30.0);
  EXPECT_EQ(fit.points, 27u);
}

TEST(Fit, PowerLawRejectsNonPositive) {
  const std::vector<double> x{1, 2, 3}, y{1, -0.1, 0.2};
  EXPECT_THROW(fit_power_law(x, y, {1, 3}), NumericError);
}

TEST(Fit, CriticalHalfChainProfile) {
  const auto lat = local_information(ground_state(build_tb_hamiltonian(100, {}, 0.0, 1e-5, 1.0)));
  const auto profile = scale_profile(lat);
  std::vector<double> ell;
  for (std::size_t k = 0; k < profile.size(); ++k) ell.push_back(static_cast<double>(k));
  const auto fit = fit_power_law(ell, profile, {4, 40});
  EXPECT_GE(fit.parameter, -2.3);
  EXPECT_LE(fit.parameter, -1.7);
}
