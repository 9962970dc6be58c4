#pragma once

#include <span>
#include <vector>

#include "memsq/core.hpp"

namespace memsq {

/// Composite three-point Newton-Cotes on (possibly unequal) node triples,
/// one trapezoid panel when the interval count is odd. If radial_power > 0 the
/// integrand is multiplied by X^radial_power before integration.
double composite_integral(std::span<const double> values, std::span<const double> X,
                          int radial_power = 0);

struct NonlocalGain {
  double integral = 0.0;  // over the full domain
  double H = 1.0;         // 1 + alpha * integral
  double K = 1.0;         // H^2
};

/// Integral of f(u) over the full domain from half-domain (or radial) samples:
/// 2x the half interval, or |S^{N-1}| * int r^{N-1} f dr on a ball.
double domain_integral(std::span<const double> values, std::span<const double> X,
                       const ProblemParams& params);

NonlocalGain nonlocal_gain(std::span<const double> u, std::span<const double> X,
                           const ProblemParams& params);
inline NonlocalGain nonlocal_gain(const FieldState& field, const MeshState& mesh,
                                  const ProblemParams& params) {
  return nonlocal_gain(field.u, mesh.X, params);
}

/// Centered nonuniform derivative at interior nodes, 0 at the symmetry node
/// X_0 = 0, three-point one-sided difference at the outer node.
std::vector<double> nodal_gradient(std::span<const double> X, std::span<const double> u);

/// Measure of the boundary: the two endpoints of (-1, 1), or |dB_R|.
double boundary_measure(const ProblemParams& params);

/// f_i = lambda (1-u_i)^{-2} / K.
std::vector<double> reaction(std::span<const double> u, std::span<const double> X,
                             const ProblemParams& params);

}  // namespace memsq
