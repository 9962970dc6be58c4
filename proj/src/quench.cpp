#include "memsq/quench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "memsq/quadrature.hpp"

namespace memsq {

namespace {

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalFailure("degenerate fit: abscissae coincide");
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  line.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return line;
}

// Ledger rows inside the last given decades of 1 - max u, final rows dropped.
std::vector<std::size_t> fit_rows(const Trajectory& traj, const QuenchSettings& s, double decades) {
  const auto& L = traj.ledger;
  if (L.size() <= s.exclude_last + 1) throw NumericalFailure("insufficient ledger points for a fit");
  const std::size_t end = L.size() - s.exclude_last;
  const double d_end = 1.0 - L[end - 1].umax;
  const double d_cut = d_end * std::pow(10.0, decades);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < end; ++i) {
    if (1.0 - L[i].umax <= d_cut) rows.push_back(i);
  }
  if (rows.size() < s.min_points) {
    throw NumericalFailure("insufficient ledger points in the fit window (" +
                           std::to_string(rows.size()) + " < " + std::to_string(s.min_points) + ")");
  }
  return rows;
}

}  // namespace

EnergyRecord energy(std::span<const double> u, std::span<const double> X,
                    const ProblemParams& params, double t) {
  const auto grad = nodal_gradient(X, u);
  std::vector<double> g2(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) g2[i] = grad[i] * grad[i];
  const NonlocalGain gain = nonlocal_gain(u, X, params);
  EnergyRecord e;
  e.t = t;
  e.dirichlet_part = 0.5 * domain_integral(g2, X, params);
  e.boundary_part = 0.5 * params.beta * boundary_measure(params) * u.back() * u.back();
  if (params.is_local()) {
    e.nonlocal_part = -params.lambda * gain.integral;
  } else {
    e.nonlocal_part = params.lambda / params.alpha / gain.H;
  }
  e.total = e.dirichlet_part + e.boundary_part + e.nonlocal_part;
  return e;
}

QuenchReport detect_and_extrapolate(const Trajectory& traj, const QuenchSettings& s) {
  if (traj.status != RunStatus::Quenched) {
    throw InvalidInput("detect_and_extrapolate: trajectory did not quench (status " +
                       to_string(traj.status) + ")");
  }
  const auto rows = fit_rows(traj, s, s.extrapolation_decades);
  std::vector<double> t, y;
  for (std::size_t i : rows) {
    const double d = 1.0 - traj.ledger[i].umax;
    t.push_back(traj.ledger[i].t);
    y.push_back(d * d * d);
  }
  const Line line = least_squares(t, y);
  if (!(line.slope < 0.0)) throw NumericalFailure("cube transform is not decreasing; no finite T_q");
  QuenchReport r;
  r.quenched = true;
  r.Tq = -line.intercept / line.slope;
  r.x_star = traj.ledger.back().x_max;
  r.fit_window = {t.front(), t.back()};
  r.fit_points = rows.size();
  r.r_squared = line.r_squared;
  r.poor_fit = line.r_squared < s.min_r_squared;
  r.terminal_H = std::sqrt(traj.ledger.back().K);
  return r;
}

RateFit fit_rate(const Trajectory& traj, double Tq, const QuenchSettings& s) {
  const auto rows = fit_rows(traj, s, s.window_decades);
  std::vector<double> x, y;
  for (std::size_t i : rows) {
    const double gap = Tq - traj.ledger[i].t;
    if (!(gap > 0.0)) continue;
    x.push_back(std::log(gap));
    y.push_back(std::log(1.0 - traj.ledger[i].umax));
  }
  if (x.size() < s.min_points) throw NumericalFailure("insufficient points before T_q for the rate fit");
  const Line line = least_squares(x, y);
  return {line.slope, std::exp(line.intercept), x.size()};
}

ProfileFit profile_fit(std::span<const double> X, std::span<const double> u,
                       std::optional<double> r_lo, double r_hi) {
  if (X.size() != u.size() || X.size() < 2) throw InvalidInput("profile_fit: bad samples");
  const double lo = r_lo.value_or(2.0 * (X[1] - X[0]));
  double sphi2 = 0.0, syphi = 0.0, sy2 = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double r = X[i];
    if (r < lo || r > r_hi || !(r > 0.0) || r == 1.0) continue;
    const double phi = std::cbrt(r * r / std::abs(std::log(r)));
    const double y = 1.0 - u[i];
    pts.emplace_back(phi, y);
    sphi2 += phi * phi;
    syphi += y * phi;
    sy2 += y * y;
  }
  if (pts.empty()) throw InvalidInput("profile_fit: window contains no nodes");
  ProfileFit fit;
  fit.C_star = syphi / sphi2;
  double ss = 0.0;
  for (const auto& [phi, y] : pts) ss += (y - fit.C_star * phi) * (y - fit.C_star * phi);
  fit.residual = sy2 > 0.0 ? std::sqrt(ss / sy2) : 0.0;
  fit.points = pts.size();
  return fit;
}

double largest_admissible_constant(std::span<const double> X, std::span<const double> u, double k) {
  const double lo = 2.0 * (X[1] - X[0]);
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i] < lo || !(X[i] > 0.0)) continue;
    c = std::min(c, (1.0 - u[i]) / std::pow(X[i], k));
  }
  return c;
}

SinglePointCheck single_point_check(std::span<const double> X, std::span<const double> u,
                                    double k, double Ck) {
  if (!(k > 2.0 / 3.0)) throw InvalidInput("single_point_check: k must exceed 2/3");
  const double lo = 2.0 * (X[1] - X[0]);
  SinglePointCheck c;
  c.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i] < lo || !(X[i] > 0.0)) continue;
    c.margin = std::min(c.margin, (1.0 - u[i]) - Ck * std::pow(X[i], k));
  }
  c.passed = c.margin >= 0.0;
  return c;
}

bool gain_stays_bounded(const Trajectory& traj, double Tq) {
  double early = 0.0;
  for (const auto& row : traj.ledger) {
    if (row.t <= 0.5 * Tq) early = std::max(early, row.K);
  }
  for (const auto& row : traj.ledger) {
    if (row.t >= 0.99 * Tq && row.K > 2.0 * early) return false;
  }
  return true;
}

double max_energy_increase(const Trajectory& traj) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < traj.ledger.size(); ++i) {
    worst = std::max(worst, traj.ledger[i].E - traj.ledger[i - 1].E);
  }
  return worst;
}

QuenchReport analyze(const Trajectory& traj, const QuenchSettings& s) {
  QuenchReport r = detect_and_extrapolate(traj, s);
  const RateFit rate = fit_rate(traj, r.Tq, s);
  r.rate_exponent = rate.gamma;
  r.rate_constant = rate.C;
  const ProfileFit p = profile_fit(traj.final_state.X, traj.final_state.u);
  r.profile_constant = p.C_star;
  r.profile_residual = p.residual;
  return r;
}

}  // namespace memsq
