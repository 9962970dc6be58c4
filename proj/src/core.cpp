#include "memsq/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace memsq {

ProblemParams validate(const ProblemParams& params) {
  if (!(params.lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (!(params.beta > 0.0)) throw InvalidInput("beta must be positive");
  if (!(params.alpha >= 0.0)) throw InvalidInput("alpha must be nonnegative");
  if (params.dim < 1) throw InvalidInput("dim must be at least 1");
  if (params.geometry.is_ball()) {
    if (!(params.geometry.radius > 0.0)) throw InvalidInput("ball radius must be positive");
  } else if (params.dim != 1) {
    throw InvalidInput("interval geometry requires dim = 1");
  }
  return params;
}

double ball_volume(int dim, double radius) {
  const double n = dim;
  return std::pow(std::numbers::pi, n / 2.0) * std::pow(radius, n) / std::tgamma(n / 2.0 + 1.0);
}

double ball_surface(int dim, double radius) {
  const double n = dim;
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) * std::pow(radius, n - 1.0) / std::tgamma(n / 2.0);
}

double next_dimension_sphere_area(int dim, double radius) {
  const double n = dim;
  return 2.0 * std::pow(std::numbers::pi, (n + 1.0) / 2.0) * std::pow(radius, n - 1.0) /
         std::tgamma((n + 1.0) / 2.0);
}

GeometryFacts geometry_facts(const ProblemParams& params) {
  if (!params.geometry.is_ball()) return {2.0, std::nullopt};
  return {ball_volume(params.dim, params.geometry.radius),
          ball_surface(params.dim, params.geometry.radius)};
}

MeshState MeshState::uniform(std::size_t intervals, double outer) {
  MeshState mesh;
  mesh.xi.resize(intervals + 1);
  mesh.X.resize(intervals + 1);
  const double dxi = 1.0 / static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) {
    mesh.xi[i] = static_cast<double>(i) * dxi;
    mesh.X[i] = outer * mesh.xi[i];
  }
  mesh.xi.back() = 1.0;
  mesh.X.back() = outer;
  return mesh;
}

void require_monotone(const std::vector<double>& X) {
  for (std::size_t i = 1; i < X.size(); ++i) {
    if (!(X[i] > X[i - 1])) {
      std::ostringstream msg;
      msg << "mesh tangled at node " << i << " (X[" << i - 1 << "]=" << X[i - 1] << ", X[" << i
          << "]=" << X[i] << ")";
      throw NumericalFailure(msg.str());
    }
  }
}

double FieldState::max() const { return *std::max_element(u.begin(), u.end()); }

std::size_t FieldState::argmax() const {
  return static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
}

double robin_residual(const std::vector<double>& X, const std::vector<double>& u, double beta) {
  const std::size_t n = X.size() - 1;
  // Three-point one-sided derivative at X_n on nonuniform spacing.
  const double h1 = X[n] - X[n - 1];
  const double h2 = X[n - 1] - X[n - 2];
  const double c0 = (2.0 * h1 + h2) / (h1 * (h1 + h2));
  const double c1 = -(h1 + h2) / (h1 * h2);
  const double c2 = h1 / (h2 * (h1 + h2));
  const double ux = c0 * u[n] + c1 * u[n - 1] + c2 * u[n - 2];
  return std::abs(ux + beta * u[n]);
}

std::pair<MeshState, FieldState> initial_state(const ProblemParams& params, std::size_t M,
                                               const std::optional<std::vector<double>>& u0) {
  validate(params);
  if (M < 8) throw InvalidInput("grid size M must be at least 8");
  MeshState mesh = MeshState::uniform(M, params.geometry.outer());
  FieldState field;
  if (!u0) {
    field.u.assign(M + 1, 0.0);
    return {mesh, field};
  }
  if (u0->size() != M + 1) throw InvalidInput("initial profile must have M+1 samples");
  for (double v : *u0) {
    if (!(v >= 0.0 && v < 1.0)) throw InvalidInput("initial profile must satisfy 0 <= u0 < 1");
  }
  // The one-sided difference is second order, so smooth admissible data is
  // accepted up to its truncation error.
  const double h = mesh.X[M] - mesh.X[M - 1];
  const double scale = std::max(1.0, *std::max_element(u0->begin(), u0->end()));
  const double tol = 1e-8 + h * h * scale;
  const double res = robin_residual(mesh.X, *u0, params.beta);
  if (res > tol) {
    std::ostringstream msg;
    msg << "initial profile violates the Robin condition (|u_x + beta u| = " << res << ")";
    throw InvalidInput(msg.str());
  }
  field.u = *u0;
  return {mesh, field};
}

}  // namespace memsq
