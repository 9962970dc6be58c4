#pragma once

// Energy bookkeeping and analysis of trajectories that approach touchdown.

#include <span>
#include <utility>
#include <vector>

#include "memsq/core.hpp"
#include "memsq/evolve.hpp"

namespace memsq {

struct EnergyRecord {
  double t = 0.0;
  double dirichlet_part = 0.0;  // (1/2) int |grad u|^2
  double boundary_part = 0.0;   // (beta/2) surface integral of u^2
  double nonlocal_part = 0.0;   // (lambda/alpha)/(1 + alpha int 1/(1-u)), or -lambda int 1/(1-u)
  double total = 0.0;
};

/// Throws NumericalFailure if max u >= 1.
EnergyRecord energy(std::span<const double> u, std::span<const double> X,
                    const ProblemParams& params, double t = 0.0);

struct QuenchSettings {
  std::size_t exclude_last = 3;  // ledger rows dropped from every fit
  double window_decades = 1.0;         // rate fit over 1 - max u within this many decades of the end
  double extrapolation_decades = 0.5;  // narrower window for the T_q line
  std::size_t min_points = 20;
  double min_r_squared = 0.999;
};

struct QuenchReport {
  bool quenched = false;
  double Tq = 0.0;
  double x_star = 0.0;
  double rate_exponent = 0.0;
  double rate_constant = 0.0;
  double profile_constant = 0.0;
  double profile_residual = 0.0;
  double terminal_H = 1.0;
  std::pair<double, double> fit_window{0.0, 0.0};
  std::size_t fit_points = 0;
  double r_squared = 0.0;  // of the cube-transform line
  bool poor_fit = false;   // r_squared below the threshold
};

/// T_q from a straight-line fit of (1 - max u)^3 against t over the last
/// extrapolation_decades of 1 - max u. Fills quenched,
/// Tq, x_star, fit_window, fit_points, r_squared, poor_fit and terminal_H.
QuenchReport detect_and_extrapolate(const Trajectory& trajectory,
                                    const QuenchSettings& settings = {});

struct RateFit {
  double gamma = 0.0;
  double C = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log(1 - max u) against log(T_q - t) over the fit window.
RateFit fit_rate(const Trajectory& trajectory, double Tq, const QuenchSettings& settings = {});

struct ProfileFit {
  double C_star = 0.0;
  double residual = 0.0;  // relative root-mean-square misfit
  std::size_t points = 0;
};

/// Fits 1 - u(r) = C* [r^2 / |ln r|]^{1/3} on r in [r_lo, r_hi]. With r_lo
/// unset the window starts at 2 (X_1 - X_0).
ProfileFit profile_fit(std::span<const double> X, std::span<const double> u,
                       std::optional<double> r_lo = std::nullopt, double r_hi = 0.1);

/// min over r >= 2 (X_1 - X_0), r > 0 of (1 - u(r)) / r^k.
double largest_admissible_constant(std::span<const double> X, std::span<const double> u, double k);

struct SinglePointCheck {
  bool passed = false;
  double margin = 0.0;  // min over the checked nodes of (1 - u) - Ck r^k
};

/// Requires k > 2/3.
SinglePointCheck single_point_check(std::span<const double> X, std::span<const double> u,
                                    double k, double Ck);

/// K(t) <= 2 max{K(t') : t' <= T_q/2} for every ledger row with t >= 0.99 T_q.
bool gain_stays_bounded(const Trajectory& trajectory, double Tq);

/// Largest increase of E between consecutive ledger rows.
double max_energy_increase(const Trajectory& trajectory);

/// Full report: detect_and_extrapolate, fit_rate and profile_fit on the final state.
QuenchReport analyze(const Trajectory& trajectory, const QuenchSettings& settings = {});

}  // namespace memsq
