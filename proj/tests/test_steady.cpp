#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "memsq/quadrature.hpp"
#include "memsq/steady.hpp"
#include "oracles.hpp"

using namespace memsq;

namespace {

ProblemParams ball_params(int dim, double beta = 1.0, double alpha = 0.0) {
  ProblemParams p;
  p.dim = dim;
  p.beta = beta;
  p.alpha = alpha;
  p.geometry = Geometry::ball(1.0);
  return p;
}

}  // namespace

TEST_CASE("local branch point satisfies both relations and a shooting oracle") {
  for (double M : {0.5, 0.761, 0.9, 0.99}) {
    const BranchPoint p = local_branch_point(M, 1.0);
    const auto [r1, r2] = local_branch_residuals(M, 1.0, p.lambda, p.m);
    CHECK(std::abs(r1) <= 1e-10);
    CHECK(std::abs(r2) <= 1e-10);
    // W'' = lambda / W^2 from (m, 0) must reach W(1) = M with W'(1) = beta (1 - M).
    const auto shot = oracle::shoot_local(p.lambda, p.m);
    CHECK(std::abs(shot.W1 - M) <= 1e-8);
    CHECK(std::abs(shot.dW1 - (1.0 - M)) <= 1e-8);
  }
  CHECK_THROWS_AS(local_branch_point(1.2, 1.0), InvalidInput);
  CHECK_THROWS_AS(local_branch_point(0.2, 1.0), NumericalFailure);
}

TEST_CASE("local fold on the 0.001 grid sits at M = 0.761") {
  CHECK(std::abs(local_branch_point(0.761, 1.0).lambda - 0.108711900526435) <= 1e-6);
}

TEST_CASE("nonlocal branch point") {
  for (double M : {0.6, 0.8}) {
    const BranchPoint a = local_branch_point(M, 1.0);
    const BranchPoint b = nonlocal_branch_point(M, 0.0, 1.0);
    CHECK(std::abs(a.lambda - b.lambda) <= 1e-12);
    CHECK(std::abs(a.m - b.m) <= 1e-12);
  }
  // lambda = mu (1 + alpha int_{-1}^{1} 1/W)^2 with the integral re-evaluated on the reconstructed profile.
  const BranchPoint p = nonlocal_branch_point(0.5, 1.0, 1.0);
  const std::size_t n = 4001;
  const auto W = reconstruct_profile(p, n);
  std::vector<double> X(n), inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    X[i] = static_cast<double>(i) / (n - 1);
    inv[i] = 1.0 / W[i];
  }
  const double H = 1.0 + 2.0 * composite_integral(inv, X);
  CHECK(std::abs(p.lambda - p.mu * H * H) / p.lambda <= 1e-6);
  CHECK(std::abs(nonlocal_branch_residual(p, 1.0, 1.0)) <= 1e-10);
  // Independent oracle for the same integral.
  const auto shot = oracle::shoot_local(p.mu, p.m);
  CHECK(std::abs(1.0 + 2.0 * shot.inv_int - H) <= 1e-6);
}

TEST_CASE("trace_branch folds") {
  const auto grid = uniform_M_grid(0.3, 0.999, 0.001);
  CHECK(grid.size() == 700);
  const Branch local = trace_branch(0.0, 1.0, grid);
  CHECK(std::abs(local.grid_fold.lambda - 0.108711900526435) <= 1e-6);
  CHECK(std::abs(local.fold.lambda - 0.108711900526435) <= 1e-6);
  CHECK_FALSE(local.fold_on_boundary);
  CHECK(local.skipped > 0);
  // Straddling points lie below the refined fold.
  CHECK(local_branch_point(local.fold.M - 0.01, 1.0).lambda < local.fold.lambda);
  CHECK(local_branch_point(local.fold.M + 0.01, 1.0).lambda < local.fold.lambda);

  const Branch nonlocal = trace_branch(1.0, 1.0, grid);
  CHECK(std::abs(nonlocal.grid_fold.lambda - 2.387086785660011) <= 1e-6);
  CHECK(nonlocal.fold.lambda >= nonlocal.grid_fold.lambda);

  const auto wide = uniform_M_grid(0.01, 0.99, 0.001);
  CHECK(std::abs(trace_branch(0.0, 1.0, wide).grid_fold.lambda - 0.108711900526435) <= 1e-6);

  std::vector<double> short_grid(10, 0.5);
  CHECK_THROWS_AS(trace_branch(0.0, 1.0, short_grid), InvalidInput);
  auto reversed = grid;
  std::reverse(reversed.begin(), reversed.end());
  CHECK_THROWS_AS(trace_branch(0.0, 1.0, reversed), InvalidInput);
}

TEST_CASE("Dirichlet limit closed form") {
  CHECK(dirichlet_limit_lambda(1.0) == 0.0);
  CHECK(dirichlet_limit_lambda(1e-12) < 1e-10);
  double best = 0.0;
  for (int k = 1; k < 10000; ++k) best = std::max(best, dirichlet_limit_lambda(k * 1e-4));
  std::vector<double> grid;
  for (int k = 0; k <= 800; ++k) grid.push_back(1.0 - std::exp(std::log(1e-9) + (std::log(0.9) - std::log(1e-9)) * (800 - k) / 800.0));
  std::sort(grid.begin(), grid.end());
  const Branch b = trace_branch(0.0, 1e6, grid);
  CHECK(std::abs(b.fold.lambda - best) <= 1e-3);
}

TEST_CASE("reconstructed profile") {
  const BranchPoint p = local_branch_point(0.8, 1.0);
  const auto W = reconstruct_profile(p, 101);
  CHECK(std::abs(W.front() - p.m) <= 1e-8);
  CHECK(std::abs(W.back() - p.M) <= 1e-8);
  for (std::size_t i = 1; i < W.size(); ++i) CHECK(W[i] > W[i - 1]);
  CHECK(profile_bracket(p.m, p.m) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  // Direct shooting to x = 0.5.
  double worst = 0.0;
  for (std::size_t i = 0; i < W.size(); i += 10) {
    const double x = i / 100.0;
    auto f = [&](double, const std::array<double, 2>& y) {
      return std::array<double, 2>{y[1], p.mu / (y[0] * y[0])};
    };
    const auto y = oracle::rk4<2>(f, {p.m, 0.0}, 0.0, x, 4000);
    worst = std::max(worst, std::abs(y[0] - W[i]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("branch point at lambda lies on the minimal side") {
  const BranchPoint p = branch_point_at_lambda(0.05, 0.0, 1.0);
  CHECK(std::abs(p.lambda - 0.05) <= 1e-12);
  CHECK(p.M > 0.761);
  CHECK_THROWS_AS(branch_point_at_lambda(0.2, 0.0, 1.0), NumericalFailure);
}

TEST_CASE("principal eigenpair") {
  ProblemParams p;
  const EigenPair e = principal_eigenpair(p);
  const double s = oracle::bisect([](double x) { return x * std::sin(x) - std::cos(x); }, 0.0, 1.5707963267948966);
  CHECK(std::abs(s - 0.8603) < 1e-4);
  CHECK(std::abs(e.lambda1 - s * s) <= 1e-10);
  CHECK(std::abs(2.0 * composite_integral(e.phi, e.x) - 1.0) <= 1e-10);
  for (double v : e.phi) CHECK(v > 0.0);
  CHECK(e.m1 == doctest::Approx(e.phi.back()));

  p.beta = 1e8;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(principal_eigenpair(p).lambda1 - pi2 / 4.0) <= 1e-6);

  const ProblemParams disk = ball_params(2, 1e8);
  const EigenPair eb = principal_eigenpair(disk);
  const double j0 = oracle::bisect([](double x) { return std::cyl_bessel_j(0.0, x); }, 2.0, 3.0);
  CHECK(std::abs(eb.lambda1 - j0 * j0) <= 1e-4);
  CHECK(std::abs(domain_integral(eb.phi, eb.x, disk) - 1.0) <= 1e-8);

  // N = 1 "ball" of radius 1 is the interval.
  const EigenPair e1 = principal_eigenpair(ball_params(1));
  CHECK(std::abs(e1.lambda1 - s * s) <= 1e-9);
}

TEST_CASE("upper and lower bounds around the fold") {
  ProblemParams p;
  p.alpha = 1.0;
  const EigenPair e = principal_eigenpair(p);
  CHECK(upper_bound_lambda_star(p) == doctest::Approx(2.0 * e.lambda1 * 5.0 / (2.0 * e.m1)));
  p.alpha = 0.0;
  CHECK(upper_bound_lambda_star(p) == doctest::Approx(2.0 * e.lambda1 / (2.0 * e.m1)));
  CHECK(mu_star_lower_bound(p) == doctest::Approx(0.108712).epsilon(1e-5));
  p.alpha = 1.0;
  CHECK(mu_star_lower_bound(p) == doctest::Approx(9.0 * 0.1087121199).epsilon(1e-8));
  const auto grid = uniform_M_grid(0.3, 0.999, 0.001);
  for (double alpha : {0.5, 1.0, 2.0}) {
    p.alpha = alpha;
    const double fold = trace_branch(alpha, 1.0, grid).fold.lambda;
    CHECK(mu_star_lower_bound(p) <= fold);
    CHECK(fold <= upper_bound_lambda_star(p));
  }
}

TEST_CASE("Pohozaev bound value and applicability") {
  const double pi = std::numbers::pi;
  const double area = 8.0 * pi * pi / 3.0;  // 2 pi^{5/2} / Gamma(5/2)
  const double vol = std::pow(pi, 2.5) / (15.0 * std::sqrt(pi) / 8.0);
  const auto a0 = pohozaev_lower_bound(ball_params(5));
  REQUIRE(a0.has_value());
  CHECK(*a0 == doctest::Approx(area * 3.0 / vol).epsilon(1e-13));
  const auto a1 = pohozaev_lower_bound(ball_params(5, 1.0, 1.0));
  CHECK(*a1 / *a0 == doctest::Approx((1.0 + vol) * (1.0 + vol)).epsilon(1e-13));
  CHECK_FALSE(pohozaev_lower_bound(ball_params(3)).has_value());
  CHECK_THROWS_AS(pohozaev_lower_bound(ProblemParams{}), InvalidInput);
}

TEST_CASE("quench threshold") {
  std::vector<double> X(21), zero(21, 0.0);
  for (int i = 0; i <= 20; ++i) X[i] = i / 20.0;
  ProblemParams p;
  p.alpha = 0.1;
  auto q = quench_threshold_lambda(zero, X, p);
  CHECK(q.q_alpha == 1.0);
  REQUIRE(q.lambda_tilde.has_value());
  CHECK(*q.lambda_tilde == 0.0);
  CHECK(q_alpha(0.5, 2.0) == doctest::Approx(1.0 / 3.0));
  p.alpha = 1.0;
  q = quench_threshold_lambda(zero, X, p);
  CHECK(q.A_alpha == doctest::Approx(1.0 / 6.0 - 2.0 / 3.0));
  CHECK_FALSE(q.lambda_tilde.has_value());
  p.alpha = 0.0;
  CHECK_THROWS_AS(quench_threshold_lambda(zero, X, p), InvalidInput);
}

TEST_CASE("radial branch against an RK4 shooting oracle") {
  const ProblemParams p = ball_params(3);
  const RadialBranch rb(p);
  for (double s : {0.5, 1.5, 3.0}) {
    const auto pt = rb.point(s);
    const auto y = oracle::shoot_radial(3, s);
    const double m = 1.0 / (s * y[1] + y[0]);
    CHECK(std::abs(pt.m - m) <= 1e-9);
    CHECK(std::abs(pt.mu - s * s * m * m * m) <= 1e-9);
    // Profile: Robin condition at r = 1 from the sampled solution.
    std::vector<double> r{0.98, 0.99, 1.0};
    const auto w = rb.profile(s, r);
    const double wr = (3.0 * w[2] - 4.0 * w[1] + w[0]) / 0.02;
    CHECK(std::abs(wr + w[2]) <= 1e-3);
  }
  // N = 1 reproduces the interval fold.
  const auto f1 = RadialBranch(ball_params(1)).fold();
  CHECK(std::abs(f1.lambda - trace_branch(0.0, 1.0, uniform_M_grid(0.3, 0.999, 0.001)).fold.lambda) <= 1e-8);
  const auto f3 = rb.fold();
  CHECK(rb.point(f3.s * 0.9).lambda < f3.lambda);
  CHECK(rb.point(f3.s * 1.1).lambda < f3.lambda);
}

TEST_CASE("Pohozaev residual") {
  const ProblemParams p = ball_params(3);
  const RadialBranch rb(p);
  const auto pt = rb.point_at_mu(0.1);
  std::vector<double> r(2001);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = i / 2000.0;
  auto v = rb.profile(pt.s, r);
  CHECK(pohozaev_residual(r, v, pt.mu, p) <= 1e-5);
  std::vector<double> zero(r.size(), 0.0);
  CHECK(pohozaev_residual(r, zero, 0.0, p) == 0.0);
  CHECK_THROWS_AS(pohozaev_residual(r, v, pt.mu, ProblemParams{}), InvalidInput);
  // Perturbing the boundary slope breaks the identity well above round-off.
  for (std::size_t i = 0; i < r.size(); ++i) v[i] *= 1.0 + 0.05 * r[i] * r[i];
  CHECK(pohozaev_residual(r, v, pt.mu, p) > 1e-3);
}
