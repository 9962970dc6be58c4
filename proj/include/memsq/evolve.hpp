#pragma once

// Moving-mesh time stepping for the half-domain (interval) or radial (ball)
// problem. Node 0 is the symmetry point, node n the boundary; the boundary
// value u_n is eliminated through the discrete Robin relation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "memsq/core.hpp"

namespace memsq {

struct SchemeConfig {
  double epsilon = 1e-2;       // MMPDE relaxation time
  double dtau = 1e-3;          // initial computational step
  double dtau_max = 1.0;       // ceiling for step growth
  double monitor_floor = 1.0;  // added under (1-u)^{-2}
  double quench_guard = 1e-3;  // stop once max u >= 1 - quench_guard
  double steady_tol = 1e-6;    // ||du/dt|| threshold, 10 consecutive steps
  double t_final = 40.0;
  double max_relative_change = 0.04;  // per-step cap on the relative change of 1 - max u
  bool smooth_monitor = true;
  bool freeze_mesh = false;
  std::size_t snapshot_every = 0;  // 0 keeps only the first and last states

  bool operator==(const SchemeConfig&) const = default;
};

/// Throws InvalidInput unless the fields are admissible.
SchemeConfig validate(const SchemeConfig& config);

/// Full state y = (t, u_0..u_n, X_0..X_n).
struct DaeVector {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> X;

  std::size_t intervals() const { return X.size() - 1; }
};

/// u_n = u_{n-1} / (1 + beta (X_n - X_{n-1})).
void apply_robin(DaeVector& y, double beta);

/// M_i = (1 - u_i)^{-2} + floor.
std::vector<double> monitor(std::span<const double> u, double floor);
/// g = 1 / max_i M_i.
double time_dilation(std::span<const double> u, double floor);
/// One pass of three-point averaging (end values use their one neighbour).
std::vector<double> smooth(std::span<const double> values);

struct Stencils {
  std::vector<double> dx;     // centered first derivative, 0 at both ends
  std::vector<double> dxx;    // three-point second derivative, 0 at both ends
  std::vector<double> dxixi;  // uniform-xi second difference of X, 0 at both ends
  std::vector<double> flux;   // Delta_xi (Mbar Delta_xi X), 0 at both ends
};

/// The four difference operators at the interior nodes on the uniform xi grid
/// with spacing 1/n. Mon is the (possibly smoothed) monitor at the nodes.
Stencils stencils(std::span<const double> X, std::span<const double> u,
                  std::span<const double> Mon);

/// Discrete Laplacian including the radial term and the symmetric limit
/// N * 2 (u_1 - u_0) / X_1^2 at the origin node. Entry n is unused (0).
std::vector<double> laplacian(std::span<const double> X, std::span<const double> u,
                              const ProblemParams& params);

/// The reduced unknown vector z = (t, u_0..u_{n-1}, X_1..X_{n-1}) has size 2n.
Eigen::VectorXd pack(const DaeVector& y);
/// Inverse of pack; the pinned nodes are copied from shape and u_n is eliminated.
DaeVector unpack(const Eigen::VectorXd& z, const DaeVector& shape, double beta);

struct Assembly {
  Eigen::MatrixXd A;  // acts on dz/dtau
  Eigen::VectorXd b;
};

/// A(y) dz/dtau = b(y) on the reduced unknowns.
Assembly assemble(const DaeVector& y, const ProblemParams& params, const SchemeConfig& config);

/// Backward-Euler residual A(y')(z' - z)/dtau - b(y'), computed without
/// forming A.
Eigen::VectorXd step_residual(const DaeVector& next, const DaeVector& prev, double dtau,
                              const ProblemParams& params, const SchemeConfig& config);

struct StepOutcome {
  DaeVector y;
  double dtau = 0.0;  // step actually taken
  int newton_iterations = 0;
  int halvings = 0;
};

/// One implicit step, halving dtau up to 20 times on Newton failure, u >= 1
/// or mesh tangling. Throws NumericalFailure("step failure ...") afterwards.
StepOutcome step(const DaeVector& y, double dtau, const ProblemParams& params,
                 const SchemeConfig& config);

enum class RunStatus { Steady, Quenched, Horizon, Failed };
std::string to_string(RunStatus status);

struct LedgerRow {
  double t = 0.0;
  double umax = 0.0;
  double u_boundary = 0.0;
  double E = 0.0;
  double K = 1.0;
  double g = 1.0;
  double dtau = 0.0;
  double x_max = 0.0;  // node position of max u
};

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  std::vector<double> X;
  std::vector<double> u;
};

struct Trajectory {
  ProblemParams params;
  SchemeConfig scheme;
  std::vector<LedgerRow> ledger;  // row 0 is the initial state
  std::vector<Snapshot> snapshots;
  DaeVector final_state;
  RunStatus status = RunStatus::Failed;
  std::string message;
  std::size_t rejected_steps = 0;
};

Trajectory integrate(const ProblemParams& params, const SchemeConfig& config, std::size_t M,
                     const std::optional<std::vector<double>>& u0 = std::nullopt);

}  // namespace memsq
