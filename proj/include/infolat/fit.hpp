#pragma once

// Least-squares fits for the decay signatures: i ~ exp(-alpha t^2) and
// i ~ ell^p.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "infolat/errors.hpp"

namespace infolat {

enum class FitModel { gaussian_decay, power_law };

inline std::string fit_model_name(FitModel m) { return m == FitModel::gaussian_decay ? "gaussian_decay" : "power_law"; }

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const FitWindow&) const = default;
};

struct FitResult {
  FitModel model = FitModel::gaussian_decay;
  double parameter = 0.0;  ///< alpha for gaussian_decay, exponent p for power_law
  double intercept = 0.0;  ///< log of the amplitude
  FitWindow window;
  std::size_t points = 0;
  double residual_norm = 0.0;  ///< 2-norm of the log-space residuals
  bool flagged = false;        ///< fit not meaningful (degenerate data or flat series)
  std::string note;
};

namespace detail {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

// Ordinary least squares y = slope * x + intercept.
inline Line least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  Line line;
  if (sxx <= 0.0) {
    line.degenerate = true;
    line.intercept = my;
  } else {
    line.slope = sxy / sxx;
    line.intercept = my - line.slope * mx;
  }
  double r2 = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (line.slope * x[k] + line.intercept);
    r2 += r * r;
  }
  line.residual = std::sqrt(r2);
  return line;
}

}  // namespace detail

/// Fits log y = log a - alpha t^2 over t in [window.lo, window.hi]. Without an
/// explicit window, the window starts at the first sample and ends at the last
/// sample before y first drops below `floor`.
inline FitResult fit_gaussian_decay(std::span<const double> t, std::span<const double> y,
                                    std::optional<FitWindow> window = std::nullopt, double floor = 1e-3) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_gaussian_decay: t and y differ in length");
  if (t.empty()) throw NumericError("fit_gaussian_decay: empty series");
  FitWindow w;
  if (window) {
    w = *window;
  } else {
    w.lo = t.front();
    w.hi = t.front();
    for (std::size_t k = 0; k < t.size() && y[k] >= floor; ++k) w.hi = t[k];
  }
  if (w.lo < t.front() || w.hi > t.back() || w.hi < w.lo) {
    throw std::invalid_argument(fmt::format("fit window [{}, {}] outside the data range [{}, {}]", w.lo, w.hi,
                                            t.front(), t.back()));
  }
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < w.lo || t[k] > w.hi) continue;
    if (!(y[k] > 0.0)) {
      throw NumericError(fmt::format("fit_gaussian_decay: non-positive value {:.3g} at t={}", y[k], t[k]));
    }
    xs.push_back(t[k] * t[k]);
    ys.push_back(std::log(y[k]));
  }
  FitResult fit{FitModel::gaussian_decay};
  fit.window = w;
  fit.points = xs.size();
  if (xs.size() < 2) {
    fit.flagged = true;
    fit.note = "fewer than two points in the window";
    return fit;
  }
  const auto line = detail::least_squares(xs, ys);
  fit.parameter = -line.slope;
  fit.intercept = line.intercept;
  fit.residual_norm = line.residual;
  // a flat series has no decay to speak of
  if (line.degenerate || std::abs(fit.parameter) < 1e-12) {
    fit.flagged = true;
    fit.note = "no measurable decay";
  }
  return fit;
}

/// Fits log y = log a + p log x over x in [window.lo, window.hi].
inline FitResult fit_power_law(std::span<const double> x, std::span<const double> y, FitWindow window) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: x and y differ in length");
  if (x.empty()) throw NumericError("fit_power_law: empty series");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < window.lo || x[k] > window.hi) continue;
    if (!(y[k] > 0.0) || !(x[k] > 0.0)) {
      throw NumericError(fmt::format("fit_power_law: non-positive point ({}, {:.3g})", x[k], y[k]));
    }
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  FitResult fit{FitModel::power_law};
  fit.window = window;
  fit.points = lx.size();
  if (lx.size() < 2) {
    fit.flagged = true;
    fit.note = "fewer than two points in the window";
    return fit;
  }
  const auto line = detail::least_squares(lx, ly);
  fit.parameter = line.slope;
  fit.intercept = line.intercept;
  fit.residual_norm = line.residual;
  fit.flagged = line.degenerate;
  return fit;
}

/// Default power-law window ell in [4, min(40, L / 2)] for a profile of length L.
inline FitWindow default_power_law_window(std::size_t length) {
  return {4.0, std::min(40.0, std::floor(static_cast<double>(length) / 2.0))};
}

}  // namespace infolat
