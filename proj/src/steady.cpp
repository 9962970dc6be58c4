#include "memsq/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "memsq/quadrature.hpp"
#include "numerics.hpp"

namespace memsq {

namespace {

constexpr double kMinGap = 1e-10;  // smallest admissible M - m
constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 50;

double bracket_dm(double W, double m) {
  const double d = W - m;
  const double sq = std::sqrt(W) + std::sqrt(d);
  return -W / (2.0 * std::sqrt(W * d)) - 0.5 * std::log(m) - 0.5 + std::log(sq) -
         m / (2.0 * std::sqrt(d) * sq);
}

double log_ratio(double M, double m) {
  return std::log((2.0 * M - m + 2.0 * std::sqrt(M * (M - m))) / m);
}

// Largest root m of B(M,m)^2 (M - m) = M beta^2 (1-M)^2, which is the local
// system with lambda eliminated.
std::optional<double> scan_for_m(double M, double beta) {
  const double c = M * beta * beta * (1.0 - M) * (1.0 - M);
  auto G = [&](double m) {
    const double b = profile_bracket(M, m);
    return b * b * (M - m) - c;
  };
  const int n = 600;
  const double lo = std::log(kMinGap * std::max(M, 1e-3));
  const double hi = std::log(M * (1.0 - 1e-14));
  double prev_m = M - std::exp(lo);
  double prev_g = G(prev_m);
  for (int k = 1; k <= n; ++k) {
    const double m = M - std::exp(lo + (hi - lo) * k / n);
    if (!(m > 0.0)) break;
    const double g = G(m);
    if (std::isfinite(g) && std::isfinite(prev_g) && std::signbit(g) != std::signbit(prev_g)) {
      return detail::bracketed_root(G, m, prev_m);
    }
    prev_m = m;
    prev_g = g;
  }
  return std::nullopt;
}

bool newton_local(double M, double beta, double& lambda, double& m) {
  auto norm = [](std::pair<double, double> r) { return std::max(std::abs(r.first), std::abs(r.second)); };
  auto res = local_branch_residuals(M, beta, lambda, m);
  double rn = norm(res);
  const double c = M * beta * beta * (1.0 - M) * (1.0 - M);
  for (int it = 0; it < kNewtonMaxIter && !(rn <= kNewtonTol); ++it) {
    const double root = std::sqrt(m / (2.0 * lambda));
    const double b = profile_bracket(M, m);
    const double j11 = 2.0 * m - 2.0 * M;
    const double j12 = 2.0 * lambda + c;
    const double j21 = -root * b / (2.0 * lambda);
    const double j22 = root * b / (2.0 * m) + root * bracket_dm(M, m);
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return false;
    const double dl = -(res.first * j22 - j12 * res.second) / det;
    const double dm = -(j11 * res.second - j21 * res.first) / det;
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, step *= 0.5) {
      const double nl = lambda + step * dl;
      const double nm = m + step * dm;
      if (!(nl > 0.0) || !(nm > 0.0) || !(M - nm >= kMinGap)) continue;
      const auto nres = local_branch_residuals(M, beta, nl, nm);
      const double nn = norm(nres);
      if (std::isfinite(nn) && nn < rn) {
        lambda = nl;
        m = nm;
        res = nres;
        rn = nn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return rn <= 1e-10;
}

}  // namespace

double profile_bracket(double W, double m) {
  const double d = std::max(W - m, 0.0);
  return std::sqrt(W * d) - 0.5 * m * std::log(m) + m * std::log(std::sqrt(W) + std::sqrt(d));
}

std::pair<double, double> local_branch_residuals(double M, double beta, double lambda, double m) {
  const double c = M * beta * beta * (1.0 - M) * (1.0 - M);
  const double r1 = m * (2.0 * lambda + c) - 2.0 * lambda * M;
  const double r2 = std::sqrt(m / (2.0 * lambda)) * profile_bracket(M, m) - 1.0;
  return {r1, r2};
}

BranchPoint local_branch_point(double M, double beta, std::optional<BranchPoint> warm) {
  if (!(M > 0.0 && M < 1.0)) throw InvalidInput("local_branch_point: M must lie in (0, 1)");
  if (!(beta > 0.0)) throw InvalidInput("local_branch_point: beta must be positive");
  if (warm && warm->mu > 0.0 && warm->m > 0.0 && M - warm->m >= kMinGap) {
    double lambda = warm->mu;
    double m = warm->m;
    if (newton_local(M, beta, lambda, m)) return {M, m, lambda, lambda};
  }
  const auto m0 = scan_for_m(M, beta);
  if (!m0) {
    std::ostringstream msg;
    msg << "no steady state with M = " << M << " for beta = " << beta;
    throw NumericalFailure(msg.str());
  }
  double m = *m0;
  const double b = profile_bracket(M, m);
  double lambda = 0.5 * m * b * b;
  if (!newton_local(M, beta, lambda, m)) {
    // The bracketed root already satisfies the system to round-off unless the
    // Newton polish stalls on a flat residual; accept it if so.
    const auto r = local_branch_residuals(M, beta, lambda, m);
    if (!(std::max(std::abs(r.first), std::abs(r.second)) <= 1e-10)) {
      throw NumericalFailure("local branch Newton iteration failed to converge");
    }
  }
  if (M - m < kMinGap) throw NumericalFailure("degenerate branch point (M - m below cutoff)");
  return {M, m, lambda, lambda};
}

BranchPoint nonlocal_branch_point(double M, double alpha, double beta,
                                  std::optional<BranchPoint> warm) {
  if (!(alpha >= 0.0)) throw InvalidInput("nonlocal_branch_point: alpha must be nonnegative");
  BranchPoint p = local_branch_point(M, beta, warm);
  if (!(p.m < p.M)) throw NumericalFailure("nonlocal_branch_point: m >= M");
  const double factor = 1.0 + alpha * 2.0 * log_ratio(p.M, p.m) / profile_bracket(p.M, p.m);
  p.lambda = p.mu * factor * factor;
  return p;
}

double nonlocal_branch_residual(const BranchPoint& p, double alpha, double beta) {
  const double lhs = beta * beta * (p.M - 1.0) * (p.M - 1.0) / 2.0 * p.m * p.M / (p.M - p.m);
  const double factor = 1.0 + alpha * 2.0 * log_ratio(p.M, p.m) / profile_bracket(p.M, p.m);
  return lhs - p.lambda / (factor * factor);
}

Branch trace_branch(double alpha, double beta, std::span<const double> M_grid) {
  if (M_grid.size() < 50) throw InvalidInput("trace_branch: M grid needs at least 50 points");
  for (std::size_t i = 0; i < M_grid.size(); ++i) {
    if (!(M_grid[i] > 0.0 && M_grid[i] < 1.0)) throw InvalidInput("trace_branch: M outside (0, 1)");
    if (i > 0 && !(M_grid[i] > M_grid[i - 1])) {
      throw InvalidInput("trace_branch: M grid must be strictly increasing");
    }
  }
  Branch branch;
  std::optional<BranchPoint> warm;
  // Continue from the trivial end M -> 1 toward the touchdown end.
  for (auto it = M_grid.rbegin(); it != M_grid.rend(); ++it) {
    try {
      const BranchPoint p = nonlocal_branch_point(*it, alpha, beta, warm);
      branch.points.push_back(p);
      warm = p;
    } catch (const NumericalFailure&) {
      ++branch.skipped;
      warm.reset();
    }
  }
  if (branch.points.empty()) throw NumericalFailure("trace_branch: no steady states on the M grid");
  std::reverse(branch.points.begin(), branch.points.end());

  const auto& pts = branch.points;
  const auto best = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.lambda < b.lambda;
  });
  const std::size_t k = static_cast<std::size_t>(best - pts.begin());
  branch.grid_fold = *best;
  branch.fold = *best;
  if (k == 0 || k + 1 == pts.size()) {
    branch.fold_on_boundary = true;
    return branch;
  }
  const BranchPoint seed = *best;
  auto lam = [&](double M) { return nonlocal_branch_point(M, alpha, beta, seed).lambda; };
  const auto [Mf, lf] = detail::golden_maximize(lam, pts[k - 1].M, pts[k + 1].M, 1e-10);
  if (lf >= best->lambda) branch.fold = nonlocal_branch_point(Mf, alpha, beta, seed);
  return branch;
}

std::vector<double> uniform_M_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  const long first = std::lround(std::ceil(lo / step - 1e-9));
  const long last = std::lround(std::floor(hi / step + 1e-9));
  for (long k = first; k <= last; ++k) grid.push_back(static_cast<double>(k) * step);
  return grid;
}

namespace {

// Fold located on a grid in log(1 - M), valid for any beta.
BranchPoint locate_fold(double alpha, double beta) {
  std::vector<double> grid;
  const int n = 400;
  for (int k = n; k >= 0; --k) {
    const double gap = std::exp(std::log(1e-13) + (std::log(0.999) - std::log(1e-13)) * k / n);
    grid.push_back(1.0 - gap);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const Branch b = trace_branch(alpha, beta, grid);
  return b.fold;
}

}  // namespace

BranchPoint branch_point_at_lambda(double lambda, double alpha, double beta) {
  const BranchPoint fold = locate_fold(alpha, beta);
  if (!(lambda > 0.0)) throw InvalidInput("branch_point_at_lambda: lambda must be positive");
  if (lambda > fold.lambda) throw NumericalFailure("no steady state: lambda exceeds the pull-in value");
  double gap = 1.0 - fold.M;
  double hi = fold.M;
  for (int k = 0; k < 60; ++k) {
    gap *= 0.5;
    const double M = 1.0 - gap;
    if (nonlocal_branch_point(M, alpha, beta).lambda < lambda) {
      hi = M;
      break;
    }
  }
  if (hi == fold.M) throw NumericalFailure("branch_point_at_lambda: could not bracket lambda");
  auto f = [&](double M) { return nonlocal_branch_point(M, alpha, beta).lambda - lambda; };
  const double M = detail::bracketed_root(f, fold.M, hi);
  return nonlocal_branch_point(M, alpha, beta);
}

double dirichlet_limit_lambda(double m) {
  if (!(m > 0.0 && m <= 1.0)) throw InvalidInput("dirichlet_limit_lambda: m must lie in (0, 1]");
  const double r = std::sqrt(1.0 - m);
  const double b = r - 0.5 * m * std::log(m) + m * std::log(1.0 + r);
  return 0.5 * m * b * b;
}

double profile_at(const BranchPoint& p, double x) {
  const double scale = std::sqrt(p.m / (2.0 * p.mu));
  if (std::abs(scale * profile_bracket(p.M, p.m) - 1.0) > 1e-8) {
    throw NumericalFailure("profile map does not reach x = 1 at W = M (inconsistent branch point)");
  }
  if (x <= 0.0) return p.m;
  if (x >= 1.0) return p.M;
  auto f = [&](double W) { return scale * profile_bracket(W, p.m) - x; };
  // f(m) = -x < 0; f(M) = 1 - x > 0 up to the endpoint tolerance.
  const double fM = f(p.M);
  if (!(fM > 0.0)) return p.M;
  return detail::bracketed_root(f, p.m, p.M);
}

std::vector<double> reconstruct_profile(const BranchPoint& point, std::size_t nsamples) {
  if (nsamples < 2) throw InvalidInput("reconstruct_profile: need at least two samples");
  std::vector<double> W(nsamples);
  for (std::size_t j = 0; j < nsamples; ++j) {
    W[j] = profile_at(point, static_cast<double>(j) / static_cast<double>(nsamples - 1));
  }
  for (std::size_t j = 1; j < nsamples; ++j) {
    if (!(W[j] > W[j - 1])) throw NumericalFailure("reconstructed profile is not monotone");
  }
  return W;
}

std::optional<double> pohozaev_lower_bound(const ProblemParams& params) {
  validate(params);
  if (!params.geometry.is_ball()) throw InvalidInput("pohozaev_lower_bound requires a ball");
  const double N = params.dim;
  const double R = params.geometry.radius;
  const double denom = N - 2.0 * (1.0 + params.beta * R);
  if (!(denom > 0.0)) return std::nullopt;
  const double area = ball_surface(params.dim, R);
  const double vol = ball_volume(params.dim, R);
  const double h = 1.0 + params.alpha * vol;
  return params.beta * area * (N - 2.0) / denom * h * h / vol;
}

EigenPair principal_eigenpair(const ProblemParams& params, std::size_t nsamples) {
  validate(params);
  if (nsamples < 3) throw InvalidInput("principal_eigenpair: need at least three samples");
  const double beta = params.beta;
  const double R = params.geometry.outer();
  EigenPair e;
  e.x.resize(nsamples);
  for (std::size_t j = 0; j < nsamples; ++j) {
    e.x[j] = R * static_cast<double>(j) / static_cast<double>(nsamples - 1);
  }
  e.x.back() = R;

  if (!params.geometry.is_ball()) {
    // s tan s = beta on (0, pi/2), written without the pole.
    auto f = [&](double s) { return s * std::sin(s) - beta * std::cos(s); };
    const double s = detail::bracketed_root(f, 0.0, std::numbers::pi / 2.0);
    e.lambda1 = s * s;
    const double c = s / (2.0 * std::sin(s));
    e.phi.resize(nsamples);
    for (std::size_t j = 0; j < nsamples; ++j) e.phi[j] = c * std::cos(s * e.x[j]);
    e.m1 = c * std::cos(s);
    return e;
  }

  const int N = params.dim;
  const double r0 = 1e-6 * R;
  auto start = [&](double lam) {
    return detail::State3{1.0 - lam * r0 * r0 / (2.0 * N), -lam * r0 / N,
                          std::pow(r0, N) / N};
  };
  auto system = [N](double lam) {
    return [N, lam](const detail::State3& y, detail::State3& dy, double r) {
      dy[0] = y[1];
      dy[1] = -(N - 1) / r * y[1] - lam * y[0];
      dy[2] = std::pow(r, N - 1) * y[0];
    };
  };
  auto mismatch = [&](double lam) {
    const auto y = detail::integrate_to(system(lam), start(lam), r0, {R}).back();
    return (y[1] + beta * y[0]) / (1.0 + beta);
  };
  const double h = 0.25 / (R * R);
  double lo = 0.0;
  double flo = beta / (1.0 + beta);
  double hi = h;
  double fhi = mismatch(hi);
  while (std::signbit(fhi) == std::signbit(flo)) {
    lo = hi;
    flo = fhi;
    hi += h;
    if (hi > 1e4 / (R * R)) throw NumericalFailure("principal_eigenpair: failed to bracket lambda1");
    fhi = mismatch(hi);
  }
  e.lambda1 = detail::bracketed_root(mismatch, lo, hi);
  std::vector<double> stops(e.x.begin() + 1, e.x.end());
  const auto states = detail::integrate_to(system(e.lambda1), start(e.lambda1), r0, stops);
  const double norm = ball_surface(N, 1.0) * states.back()[2];
  e.phi.resize(nsamples);
  e.phi[0] = 1.0 / norm;
  for (std::size_t j = 1; j < nsamples; ++j) e.phi[j] = states[j - 1][0] / norm;
  e.m1 = *std::min_element(e.phi.begin(), e.phi.end());
  return e;
}

double upper_bound_lambda_star(const ProblemParams& params) {
  const EigenPair e = principal_eigenpair(params);
  const double vol = geometry_facts(params).volume;
  return 2.0 * e.lambda1 * (1.0 + params.alpha * params.alpha * vol * vol) / (e.m1 * vol);
}

double mu_star_lower_bound(const ProblemParams& params) {
  validate(params);
  if (params.geometry.is_ball()) throw InvalidInput("mu_star_lower_bound uses the interval fold");
  const double mu_star = locate_fold(0.0, params.beta).lambda;
  const double h = 1.0 + params.alpha * geometry_facts(params).volume;
  return h * h * mu_star;
}

double q_alpha(double alpha, double volume) {
  if (volume <= 1.0 / (3.0 * alpha)) return 1.0;
  return 1.0 / (3.0 * alpha * volume);
}

QuenchThreshold quench_threshold_lambda(std::span<const double> u0, std::span<const double> X,
                                        const ProblemParams& params) {
  validate(params);
  if (!(params.alpha > 0.0)) throw InvalidInput("quench threshold is undefined for alpha = 0");
  QuenchThreshold q;
  const auto grad = nodal_gradient(X, u0);
  std::vector<double> g2(grad.size());
  std::vector<double> inv(u0.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    g2[i] = grad[i] * grad[i];
    if (!(u0[i] >= 0.0 && u0[i] < 1.0)) throw InvalidInput("initial profile must satisfy 0 <= u0 < 1");
    inv[i] = 1.0 / (1.0 - u0[i]);
  }
  q.gradient_part = 0.5 * domain_integral(g2, X, params);
  q.boundary_part = 0.5 * params.beta * boundary_measure(params) * u0.back() * u0.back();
  q.integral = domain_integral(inv, X, params);
  const double vol = geometry_facts(params).volume;
  q.q_alpha = q_alpha(params.alpha, vol);
  q.A_alpha = q.q_alpha - 2.0 * params.alpha / (1.0 + params.alpha * q.integral);
  if (q.A_alpha > 0.0) {
    q.lambda_tilde = 2.0 * params.alpha * (q.gradient_part + q.boundary_part) / q.A_alpha;
  }
  return q;
}

PohozaevTerms pohozaev_terms(std::span<const double> r, std::span<const double> v, double mu,
                             const ProblemParams& params) {
  validate(params);
  if (!params.geometry.is_ball()) throw InvalidInput("pohozaev_residual: non-radial input (interval)");
  if (r.size() != v.size() || r.size() < 3) throw InvalidInput("pohozaev_residual: bad samples");
  const double R = params.geometry.radius;
  if (r.front() != 0.0 || std::abs(r.back() - R) > 1e-12 * R) {
    throw InvalidInput("pohozaev_residual: samples must span [0, R]");
  }
  const double N = params.dim;
  std::vector<double> vf(v.size());
  std::vector<double> F(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = 1.0 - v[i];
    vf[i] = v[i] / (d * d);
    F[i] = v[i] / d;
  }
  const double vr = nodal_gradient(r, v).back();
  const double area = ball_surface(params.dim, R);
  PohozaevTerms t;
  t.lhs = mu * (N - 2.0) / 2.0 * domain_integral(vf, r, params) - mu * N * domain_integral(F, r, params);
  t.rhs = area * ((N - 2.0) / (2.0 * params.beta) * vr * vr + 0.5 * R * vr * vr - R * vr * vr -
                  mu * R * F.back());
  return t;
}

double pohozaev_residual(std::span<const double> r, std::span<const double> v, double mu,
                         const ProblemParams& params) {
  const PohozaevTerms t = pohozaev_terms(r, v, mu, params);
  const double scale = std::max(std::abs(t.lhs), std::abs(t.rhs));
  if (scale == 0.0) return 0.0;
  return std::abs(t.lhs - t.rhs) / scale;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSeriesEnd = 1e-4;

struct YSystem {
  int N;
  void operator()(const detail::State3& y, detail::State3& dy, double rho) const {
    dy[0] = y[1];
    dy[1] = 1.0 / (y[0] * y[0]) - (N - 1) / rho * y[1];
    dy[2] = std::pow(rho, N - 1) / y[0];
  }
};

detail::State3 y_series(int N, double rho) {
  return {1.0 + rho * rho / (2.0 * N), rho / N, std::pow(rho, N) / N};
}

// Y, Y', int_0^rho t^{N-1}/Y dt at increasing rho values.
std::vector<detail::State3> y_at(int N, const std::vector<double>& rho) {
  std::vector<detail::State3> out(rho.size());
  std::vector<double> stops;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] <= kSeriesEnd) {
      out[i] = y_series(N, rho[i]);
    } else {
      stops.push_back(rho[i]);
      idx.push_back(i);
    }
  }
  if (!stops.empty()) {
    const auto states = detail::integrate_to(YSystem{N}, y_series(N, kSeriesEnd), kSeriesEnd, stops);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = states[k];
  }
  return out;
}

}  // namespace

RadialBranch::RadialBranch(const ProblemParams& params) : params_(validate(params)) {
  if (!params_.geometry.is_ball()) throw InvalidInput("RadialBranch requires a ball geometry");
}

RadialBranch::Point RadialBranch::point(double s) const {
  if (!(s > 0.0)) throw InvalidInput("RadialBranch::point: s must be positive");
  const int N = params_.dim;
  const double R = params_.geometry.radius;
  const auto y = y_at(N, {s}).front();
  Point p;
  p.s = s;
  p.m = params_.beta / (s * y[1] / R + params_.beta * y[0]);
  p.mu = s * s * p.m * p.m * p.m / (R * R);
  p.integral = ball_surface(N, 1.0) * std::pow(R / s, N) / p.m * y[2];
  const double h = 1.0 + params_.alpha * p.integral;
  p.lambda = p.mu * h * h;
  return p;
}

namespace {

template <class Value>
double refine_max(const RadialBranch& b, Value value) {
  std::vector<double> s;
  for (double x = 1e-2; x < 200.0; x *= 1.03) s.push_back(x);
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double v = value(b.point(s[k]));
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  if (best == 0 || best + 1 == s.size()) throw NumericalFailure("radial fold not bracketed");
  return detail::golden_maximize([&](double x) { return value(b.point(x)); }, s[best - 1],
                                 s[best + 1], 1e-10)
      .first;
}

}  // namespace

RadialBranch::Point RadialBranch::fold() const {
  return point(refine_max(*this, [](const Point& p) { return p.lambda; }));
}

RadialBranch::Point RadialBranch::point_at_mu(double mu) const {
  const double s_fold = refine_max(*this, [](const Point& p) { return p.mu; });
  const Point top = point(s_fold);
  if (!(mu > 0.0 && mu < top.mu)) throw InvalidInput("point_at_mu: mu outside (0, mu*)");
  const double s = detail::bracketed_root([&](double x) { return point(x).mu - mu; }, 1e-8, s_fold);
  return point(s);
}

std::vector<double> RadialBranch::profile(double s, std::span<const double> r) const {
  const Point p = point(s);
  const double R = params_.geometry.radius;
  std::vector<double> rho(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    rho[i] = s * r[i] / R;
    if (i > 0 && !(rho[i] > rho[i - 1])) throw InvalidInput("profile radii must increase");
  }
  const auto y = y_at(params_.dim, rho);
  std::vector<double> w(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = 1.0 - p.m * y[i][0];
  return w;
}

}  // namespace memsq
