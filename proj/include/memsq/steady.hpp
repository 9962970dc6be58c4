#pragma once

// Steady states of the 1-D and radial problems, written in W = 1 - w so the
// minimum m = W(0) and the maximum M = W(1) parameterize the solution family.

#include <optional>
#include <span>
#include <vector>

#include "memsq/core.hpp"

namespace memsq {

struct BranchPoint {
  double M = 1.0;       // W(1) = max W
  double m = 1.0;       // W(0) = min W
  double mu = 0.0;      // local parameter lambda / K
  double lambda = 0.0;  // nonlocal parameter
};

/// The bracket sqrt(W(W-m)) - m ln(m)/2 + m ln(sqrt(W) + sqrt(W-m)).
double profile_bracket(double W, double m);

/// Residuals of the two local-branch relations at (lambda, m) for given M and beta:
/// m = 2 lambda M / (2 lambda + M beta^2 (1-M)^2) and the x(M) = 1 condition.
std::pair<double, double> local_branch_residuals(double M, double beta, double lambda, double m);

/// Solves the local system by damped Newton on (lambda, m) with 0 < m < M,
/// following the root with the largest m. A warm start (lambda, m) is tried first.
BranchPoint local_branch_point(double M, double beta,
                               std::optional<BranchPoint> warm = std::nullopt);

/// As local_branch_point for (mu, m), then lambda = mu (1 + 2 alpha L / B)^2,
/// L = ln((2M - m + 2 sqrt(M(M-m)))/m), B = profile_bracket(M, m).
BranchPoint nonlocal_branch_point(double M, double alpha, double beta,
                                  std::optional<BranchPoint> warm = std::nullopt);

/// Residual of the nonlocal relation between lambda and the boundary data.
double nonlocal_branch_residual(const BranchPoint& p, double alpha, double beta);

struct Branch {
  std::vector<BranchPoint> points;  // ascending in M; infeasible grid values are skipped
  BranchPoint fold;                 // golden-section refined maximum of lambda(M)
  BranchPoint grid_fold;            // largest lambda among the grid points
  bool fold_on_boundary = false;    // discrete maximum sits at the first/last feasible point
  std::size_t skipped = 0;          // grid values with no steady state
};

Branch trace_branch(double alpha, double beta, std::span<const double> M_grid);

/// Uniform M grid with the given step on [lo, hi], snapped to multiples of step.
std::vector<double> uniform_M_grid(double lo, double hi, double step);

/// Steady state on the minimal (small-deflection) side of the fold with the given lambda.
BranchPoint branch_point_at_lambda(double lambda, double alpha, double beta);

/// lambda(m) of the local Dirichlet problem, the beta -> infinity limit.
double dirichlet_limit_lambda(double m);

/// W(x) for the branch point at one x in [0, 1].
double profile_at(const BranchPoint& point, double x);
/// W(x_j) at x_j = j/(nsamples-1).
std::vector<double> reconstruct_profile(const BranchPoint& point, std::size_t nsamples);

/// Closed-form value when N > 2(1 + beta R), nullopt otherwise. Ball geometry only.
std::optional<double> pohozaev_lower_bound(const ProblemParams& params);

struct EigenPair {
  double lambda1 = 0.0;
  std::vector<double> x;    // sample points on [0, outer]
  std::vector<double> phi;  // normalized so that the integral over the domain is 1
  double m1 = 0.0;          // min of phi over the closed domain
};

EigenPair principal_eigenpair(const ProblemParams& params, std::size_t nsamples = 201);

double upper_bound_lambda_star(const ProblemParams& params);

/// (1 + alpha |Omega|)^2 mu* with mu* the refined local fold. Interval geometry.
double mu_star_lower_bound(const ProblemParams& params);

struct QuenchThreshold {
  std::optional<double> lambda_tilde;  // nullopt when A_alpha <= 0 (vacuous)
  double q_alpha = 0.0;
  double A_alpha = 0.0;
  double gradient_part = 0.0;  // (1/2) int |grad u0|^2
  double boundary_part = 0.0;  // (beta/2) surface integral of u0^2
  double integral = 0.0;       // int 1/(1-u0)
};

double q_alpha(double alpha, double volume);

QuenchThreshold quench_threshold_lambda(std::span<const double> u0, std::span<const double> X,
                                        const ProblemParams& params);

/// Relative residual |LHS - RHS| / max(|LHS|, |RHS|) of the Robin Pohozaev
/// identity for a radial profile v(r) on nodes r in [0, R], f(v) = (1-v)^{-2}.
double pohozaev_residual(std::span<const double> r, std::span<const double> v, double mu,
                         const ProblemParams& params);

struct PohozaevTerms {
  double lhs = 0.0;
  double rhs = 0.0;
};
PohozaevTerms pohozaev_terms(std::span<const double> r, std::span<const double> v, double mu,
                             const ProblemParams& params);

/// Radial steady states of the ball problem through the scaling
/// W(r) = m Y(s r / R) with Y'' + (N-1) Y'/rho = Y^{-2}, Y(0) = 1, Y'(0) = 0.
/// The shooting parameter s runs along the branch from the trivial state (s -> 0).
class RadialBranch {
 public:
  struct Point {
    double s = 0.0;
    double m = 1.0;  // W(0)
    double mu = 0.0;
    double lambda = 0.0;
    double integral = 0.0;  // int_B 1/W dx
  };

  explicit RadialBranch(const ProblemParams& params);

  Point point(double s) const;
  /// Maximum of lambda along the branch (the radial pull-in value).
  Point fold() const;
  /// Point with the given mu on the minimal side of the mu-maximum.
  Point point_at_mu(double mu) const;
  /// w(r) = 1 - W(r) at the given radii.
  std::vector<double> profile(double s, std::span<const double> r) const;

 private:
  ProblemParams params_;
};

}  // namespace memsq
