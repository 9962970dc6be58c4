#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace memsq {

/// Raised for inputs that violate a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative or integration procedure cannot produce a result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GeometryKind { Interval, Ball };

/// The interval is always (-1, 1); a ball carries its radius.
struct Geometry {
  GeometryKind kind = GeometryKind::Interval;
  double radius = 1.0;

  static Geometry interval() { return {GeometryKind::Interval, 1.0}; }
  static Geometry ball(double r) { return {GeometryKind::Ball, r}; }

  bool is_ball() const { return kind == GeometryKind::Ball; }
  /// Right end of the computational half-domain [0, outer].
  double outer() const { return is_ball() ? radius : 1.0; }

  bool operator==(const Geometry&) const = default;
};

struct ProblemParams {
  double lambda = 1.0;  // applied-voltage parameter
  double alpha = 0.0;   // capacitance ratio C0/Cf; 0 selects the local problem
  double beta = 1.0;    // Robin coefficient
  int dim = 1;
  Geometry geometry = Geometry::interval();

  bool is_local() const { return alpha == 0.0; }
  bool operator==(const ProblemParams&) const = default;
};

/// Throws InvalidInput on the first violated invariant, otherwise returns params.
ProblemParams validate(const ProblemParams& params);

struct GeometryFacts {
  double volume = 0.0;
  std::optional<double> surface;  // ball only
};

GeometryFacts geometry_facts(const ProblemParams& params);

double ball_volume(int dim, double radius);
double ball_surface(int dim, double radius);
/// 2 pi^{(N+1)/2} R^{N-1} / Gamma((N+1)/2), the expression printed alongside the
/// Pohozaev bound. It is the area of the unit N-sphere in R^{N+1}, not of dB_R.
double next_dimension_sphere_area(int dim, double radius);

/// Computational grid xi_i = i/M and physical nodes X_i on [0, outer].
struct MeshState {
  std::vector<double> xi;
  std::vector<double> X;

  std::size_t npoints() const { return X.size(); }
  std::size_t intervals() const { return X.size() - 1; }

  static MeshState uniform(std::size_t intervals, double outer);
};

/// Throws NumericalFailure("mesh tangled ...") unless X is strictly increasing.
void require_monotone(const std::vector<double>& X);

struct FieldState {
  std::vector<double> u;
  double t = 0.0;
  double tau = 0.0;

  double max() const;
  std::size_t argmax() const;
};

/// Maximum of the one-sided Robin residual |u_x(R) + beta u(R)| using a
/// second-order one-sided difference on nonuniform nodes.
double robin_residual(const std::vector<double>& X, const std::vector<double>& u, double beta);

/// u0 == nullopt means the zero initial profile. A supplied profile is sampled
/// on the same uniform nodes (size M+1) and must satisfy 0 <= u0 < 1 and the
/// Robin condition to 1e-8.
std::pair<MeshState, FieldState> initial_state(const ProblemParams& params, std::size_t M,
                                               const std::optional<std::vector<double>>& u0);

}  // namespace memsq
