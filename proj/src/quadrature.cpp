#include "memsq/quadrature.hpp"

#include <cmath>

namespace memsq {

namespace {

double simpson_panel(double x0, double x1, double x2, double f0, double f1, double f2) {
  const double h0 = x1 - x0;
  const double h1 = x2 - x1;
  const double h = h0 + h1;
  return h / 6.0 * ((2.0 - h1 / h0) * f0 + h * h / (h0 * h1) * f1 + (2.0 - h0 / h1) * f2);
}

}  // namespace

double composite_integral(std::span<const double> values, std::span<const double> X,
                          int radial_power) {
  if (values.size() != X.size()) throw InvalidInput("composite_integral: size mismatch");
  if (X.size() < 2) return 0.0;
  for (std::size_t i = 1; i < X.size(); ++i) {
    if (!(X[i] > X[i - 1])) throw InvalidInput("composite_integral: mesh is not monotone");
  }
  auto f = [&](std::size_t i) {
    return radial_power > 0 ? values[i] * std::pow(X[i], radial_power) : values[i];
  };
  const std::size_t n = X.size() - 1;
  const std::size_t paired = n - n % 2;
  double sum = 0.0;
  for (std::size_t i = 0; i < paired; i += 2) {
    sum += simpson_panel(X[i], X[i + 1], X[i + 2], f(i), f(i + 1), f(i + 2));
  }
  if (paired < n) sum += 0.5 * (X[n] - X[n - 1]) * (f(n - 1) + f(n));
  return sum;
}

double domain_integral(std::span<const double> values, std::span<const double> X,
                       const ProblemParams& params) {
  if (!params.geometry.is_ball()) return 2.0 * composite_integral(values, X);
  return ball_surface(params.dim, 1.0) * composite_integral(values, X, params.dim - 1);
}

NonlocalGain nonlocal_gain(std::span<const double> u, std::span<const double> X,
                           const ProblemParams& params) {
  std::vector<double> inv(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] < 1.0)) throw NumericalFailure("state already quenched");
    inv[i] = 1.0 / (1.0 - u[i]);
  }
  NonlocalGain gain;
  gain.integral = domain_integral(inv, X, params);
  gain.H = 1.0 + params.alpha * gain.integral;
  gain.K = gain.H * gain.H;
  return gain;
}

std::vector<double> nodal_gradient(std::span<const double> X, std::span<const double> u) {
  const std::size_t n = X.size() - 1;
  std::vector<double> g(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) g[i] = (u[i + 1] - u[i - 1]) / (X[i + 1] - X[i - 1]);
  const double h1 = X[n] - X[n - 1];
  const double h2 = X[n - 1] - X[n - 2];
  g[n] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * u[n] - (h1 + h2) / (h1 * h2) * u[n - 1] +
         h1 / (h2 * (h1 + h2)) * u[n - 2];
  return g;
}

double boundary_measure(const ProblemParams& params) {
  if (!params.geometry.is_ball()) return 2.0;
  return ball_surface(params.dim, params.geometry.radius);
}

std::vector<double> reaction(std::span<const double> u, std::span<const double> X,
                             const ProblemParams& params) {
  const double K = nonlocal_gain(u, X, params).K;
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = 1.0 - u[i];
    f[i] = params.lambda / (v * v * K);
  }
  return f;
}

}  // namespace memsq
