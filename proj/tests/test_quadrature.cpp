#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "memsq/quadrature.hpp"

using namespace memsq;

namespace {

std::vector<double> uniform(std::size_t n) {
  std::vector<double> X(n + 1);
  for (std::size_t i = 0; i <= n; ++i) X[i] = static_cast<double>(i) / n;
  return X;
}

}  // namespace

TEST_CASE("composite integral is exact for low-degree polynomials") {
  const auto X = uniform(10);
  std::vector<double> one(X.size(), 1.0), sq;
  for (double x : X) sq.push_back(x * x);
  CHECK(composite_integral(one, X) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(composite_integral(sq, X) - 1.0 / 3.0) < 1e-14);

  // Unequal spacing: each three-point panel is still exact for quadratics.
  std::vector<double> Z{0.0, 0.1, 0.35, 0.4, 0.8};
  std::vector<double> zq;
  for (double z : Z) zq.push_back(3.0 * z * z - z + 2.0);
  CHECK(std::abs(composite_integral(zq, Z) - (0.512 - 0.32 + 1.6)) < 1e-14);
}

TEST_CASE("geometric mesh reference integral") {
  const std::size_t M = 200;
  std::vector<double> X(M + 1), f(M + 1);
  const double q = 1.01;
  const double first = (q - 1.0) / (std::pow(q, M) - 1.0);
  X[0] = 0.0;
  for (std::size_t i = 1; i <= M; ++i) X[i] = X[i - 1] + first * std::pow(q, i - 1);
  X[M] = 1.0;
  for (std::size_t i = 0; i <= M; ++i) f[i] = 1.0 / (1.0 - X[i] / 2.0);
  CHECK(std::abs(composite_integral(f, X) - 2.0 * std::log(2.0)) < 1e-6);
}

TEST_CASE("non-monotone mesh is rejected") {
  std::vector<double> X{0.0, 0.5, 0.4, 1.0}, f(4, 1.0);
  CHECK_THROWS_AS(composite_integral(f, X), InvalidInput);
}

TEST_CASE("nonlocal gain") {
  const auto X = uniform(20);
  std::vector<double> zero(X.size(), 0.0);
  ProblemParams p;
  p.alpha = 1.0;
  auto g = nonlocal_gain(zero, X, p);
  CHECK(g.integral == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.H == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(g.K == doctest::Approx(9.0).epsilon(1e-14));

  p.alpha = 0.0;
  std::vector<double> bump;
  for (double x : X) bump.push_back(0.5 * (1.0 - x * x));
  CHECK(nonlocal_gain(bump, X, p).K == 1.0);

  ProblemParams disk;
  disk.alpha = 1.0;
  disk.dim = 2;
  disk.geometry = Geometry::ball(1.0);
  const double pi = std::numbers::pi;
  CHECK(nonlocal_gain(zero, X, disk).K == doctest::Approx((1.0 + pi) * (1.0 + pi)).epsilon(1e-13));

  std::vector<double> touching(X.size(), 0.0);
  touching[0] = 1.0;
  CHECK_THROWS_AS(nonlocal_gain(touching, X, p), NumericalFailure);
}

TEST_CASE("gain integral increases with u") {
  const auto X = uniform(16);
  ProblemParams p;
  p.alpha = 1.0;
  std::vector<double> u(X.size(), 0.1);
  const double before = nonlocal_gain(u, X, p).integral;
  for (double& v : u) v += 0.01;
  CHECK(nonlocal_gain(u, X, p).integral > before);
}

TEST_CASE("reaction term") {
  const auto X = uniform(10);
  std::vector<double> zero(X.size(), 0.0), half(X.size(), 0.5);
  ProblemParams p;
  for (double f : reaction(zero, X, p)) CHECK(f == doctest::Approx(1.0));
  p.alpha = 1.0;
  p.lambda = 9.0;
  for (double f : reaction(zero, X, p)) CHECK(f == doctest::Approx(1.0).epsilon(1e-14));
  p.lambda = 1.0;
  for (double f : reaction(half, X, p)) CHECK(f == doctest::Approx(4.0 / 25.0).epsilon(1e-14));
}

TEST_CASE("nodal gradient") {
  std::vector<double> X{0.0, 0.2, 0.5, 0.6, 1.0}, u;
  for (double x : X) u.push_back(x * x);
  const auto g = nodal_gradient(X, u);
  CHECK(g[0] == 0.0);
  CHECK(g[4] == doctest::Approx(2.0).epsilon(1e-13));
  // Centered nonuniform difference of x^2 gives X_{i+1} + X_{i-1}.
  CHECK(g[2] == doctest::Approx(0.8).epsilon(1e-14));
}
