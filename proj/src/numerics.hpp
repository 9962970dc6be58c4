#pragma once

// Thin wrappers over Boost root finding and ODE integration shared by the
// steady-state and eigenvalue code.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "memsq/core.hpp"

namespace memsq::detail {

/// Root of f in [lo, hi]; f(lo) and f(hi) must differ in sign.
inline double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                             int bits = 52) {
  std::uintmax_t iters = 200;
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) throw NumericalFailure("root is not bracketed");
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                  boost::math::tools::eps_tolerance<double>(bits),
                                                  iters);
  return 0.5 * (a + b);
}

/// Golden-section maximization of a unimodal f on [a, b] down to a bracket of width tol.
inline std::pair<double, double> golden_maximize(const std::function<double(double)>& f, double a,
                                                 double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc > fd ? c : d;
  return {x, std::max(fc, fd)};
}

using State3 = std::array<double, 3>;

/// Integrates a 3-component system with adaptive Dormand-Prince from x0 to each
/// of the (increasing) stop points, returning the state at every stop.
template <class System>
std::vector<State3> integrate_to(System&& sys, State3 state, double x0,
                                 const std::vector<double>& stops, double abs_tol = 1e-13,
                                 double rel_tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_dopri5<State3>());
  std::vector<State3> out;
  out.reserve(stops.size());
  double x = x0;
  for (double stop : stops) {
    if (stop > x) {
      const double dx0 = std::min(1e-3, stop - x);
      ode::integrate_adaptive(stepper, sys, state, x, stop, dx0);
      x = stop;
    }
    out.push_back(state);
  }
  return out;
}

}  // namespace memsq::detail
