#include "memsq/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "memsq/quadrature.hpp"
#include "memsq/quench.hpp"

namespace memsq {

namespace {

constexpr int kMaxHalvings = 20;
constexpr int kNewtonMaxIter = 20;
constexpr double kNewtonTol = 1e-10;
constexpr int kSteadyRun = 10;

bool admissible(const DaeVector& y) {
  for (double v : y.u) {
    if (!(v < 1.0) || !std::isfinite(v)) return false;
  }
  for (std::size_t i = 1; i < y.X.size(); ++i) {
    if (!(y.X[i] > y.X[i - 1])) return false;
  }
  return std::isfinite(y.t);
}

std::vector<double> flux_monitor(std::span<const double> u, const SchemeConfig& config) {
  auto mon = monitor(u, config.monitor_floor);
  return config.smooth_monitor ? smooth(mon) : mon;
}

}  // namespace

SchemeConfig validate(const SchemeConfig& c) {
  if (!(c.epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (!(c.dtau > 0.0)) throw InvalidInput("dtau must be positive");
  if (!(c.dtau_max >= c.dtau)) throw InvalidInput("dtau_max must be at least dtau");
  if (!(c.monitor_floor >= 0.0)) throw InvalidInput("monitor_floor must be nonnegative");
  if (!(c.quench_guard > 0.0 && c.quench_guard < 1.0)) {
    throw InvalidInput("quench_guard must lie in (0, 1)");
  }
  if (!(c.steady_tol > 0.0)) throw InvalidInput("steady_tol must be positive");
  if (!(c.t_final > 0.0)) throw InvalidInput("t_final must be positive");
  if (!(c.max_relative_change > 0.0 && c.max_relative_change < 1.0)) {
    throw InvalidInput("max_relative_change must lie in (0, 1)");
  }
  return c;
}

void apply_robin(DaeVector& y, double beta) {
  const std::size_t n = y.intervals();
  y.u[n] = y.u[n - 1] / (1.0 + beta * (y.X[n] - y.X[n - 1]));
}

std::vector<double> monitor(std::span<const double> u, double floor) {
  std::vector<double> m(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = 1.0 - u[i];
    m[i] = 1.0 / (d * d) + floor;
  }
  return m;
}

double time_dilation(std::span<const double> u, double floor) {
  const auto m = monitor(u, floor);
  return 1.0 / *std::max_element(m.begin(), m.end());
}

std::vector<double> smooth(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> s(v.begin(), v.end());
  if (n < 3) return s;
  s[0] = 0.5 * (v[0] + v[1]);
  for (std::size_t i = 1; i + 1 < n; ++i) s[i] = (v[i - 1] + v[i] + v[i + 1]) / 3.0;
  s[n - 1] = 0.5 * (v[n - 2] + v[n - 1]);
  return s;
}

Stencils stencils(std::span<const double> X, std::span<const double> u,
                  std::span<const double> Mon) {
  const std::size_t n = X.size() - 1;
  const double inv_dxi2 = static_cast<double>(n) * static_cast<double>(n);
  Stencils s;
  s.dx.assign(n + 1, 0.0);
  s.dxx.assign(n + 1, 0.0);
  s.dxixi.assign(n + 1, 0.0);
  s.flux.assign(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double hl = X[i] - X[i - 1];
    const double hr = X[i + 1] - X[i];
    if (!(hl > 0.0) || !(hr > 0.0)) throw NumericalFailure("mesh tangled: zero or negative cell width");
    s.dx[i] = (hl * hl * (u[i + 1] - u[i]) + hr * hr * (u[i] - u[i - 1])) / (hl * hr * (hl + hr));
    s.dxx[i] = 2.0 / (hl + hr) * ((u[i + 1] - u[i]) / hr - (u[i] - u[i - 1]) / hl);
    s.dxixi[i] = (X[i + 1] - 2.0 * X[i] + X[i - 1]) * inv_dxi2;
    s.flux[i] = (0.5 * (Mon[i + 1] + Mon[i]) * hr - 0.5 * (Mon[i] + Mon[i - 1]) * hl) * inv_dxi2;
  }
  return s;
}

std::vector<double> laplacian(std::span<const double> X, std::span<const double> u,
                              const ProblemParams& params) {
  const std::size_t n = X.size() - 1;
  const double N = params.dim;
  std::vector<double> mon(n + 1, 0.0);
  const Stencils s = stencils(X, u, mon);
  std::vector<double> lap(n + 1, 0.0);
  lap[0] = N * 2.0 * (u[1] - u[0]) / (X[1] * X[1]);
  for (std::size_t i = 1; i < n; ++i) {
    lap[i] = s.dxx[i];
    if (params.geometry.is_ball() && params.dim > 1) lap[i] += (N - 1.0) / X[i] * s.dx[i];
  }
  return lap;
}

Eigen::VectorXd pack(const DaeVector& y) {
  const std::size_t n = y.intervals();
  Eigen::VectorXd z(2 * n);
  z[0] = y.t;
  for (std::size_t i = 0; i < n; ++i) z[1 + i] = y.u[i];
  for (std::size_t i = 1; i < n; ++i) z[n + i] = y.X[i];
  return z;
}

DaeVector unpack(const Eigen::VectorXd& z, const DaeVector& shape, double beta) {
  const std::size_t n = shape.intervals();
  DaeVector y;
  y.t = z[0];
  y.u.resize(n + 1);
  y.X.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) y.u[i] = z[1 + i];
  y.X[0] = shape.X[0];
  y.X[n] = shape.X[n];
  for (std::size_t i = 1; i < n; ++i) y.X[i] = z[n + i];
  apply_robin(y, beta);
  return y;
}

namespace {

struct RightSide {
  double g = 1.0;
  Stencils s;
  std::vector<double> rhs_u;  // Lap + f at nodes 0..n-1
};

RightSide right_side(const DaeVector& y, const ProblemParams& params, const SchemeConfig& config) {
  RightSide r;
  r.g = time_dilation(y.u, config.monitor_floor);
  r.s = stencils(y.X, y.u, flux_monitor(y.u, config));
  const auto lap = laplacian(y.X, y.u, params);
  const auto f = reaction(y.u, y.X, params);
  r.rhs_u.resize(y.intervals());
  for (std::size_t i = 0; i < r.rhs_u.size(); ++i) r.rhs_u[i] = lap[i] + f[i];
  return r;
}

}  // namespace

Assembly assemble(const DaeVector& y, const ProblemParams& params, const SchemeConfig& config) {
  const std::size_t n = y.intervals();
  const RightSide r = right_side(y, params, config);
  const double inv_dxi2 = static_cast<double>(n) * static_cast<double>(n);
  Assembly a;
  a.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.b = Eigen::VectorXd::Zero(2 * n);
  a.A(0, 0) = 1.0;
  a.b[0] = r.g;
  for (std::size_t i = 0; i < n; ++i) {
    a.A(1 + i, 1 + i) = 1.0;
    if (i > 0) a.A(1 + i, n + i) = -r.s.dx[i];
    a.b[1 + i] = r.g * r.rhs_u[i];
  }
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t row = n + i;
    if (config.freeze_mesh) {
      a.A(row, row) = 1.0;
      continue;
    }
    a.A(row, row) = 2.0 * inv_dxi2;
    if (i > 1) a.A(row, row - 1) = -inv_dxi2;
    if (i + 1 < n) a.A(row, row + 1) = -inv_dxi2;
    a.b[row] = r.g / config.epsilon * r.s.flux[i];
  }
  return a;
}

Eigen::VectorXd step_residual(const DaeVector& next, const DaeVector& prev, double dtau,
                              const ProblemParams& params, const SchemeConfig& config) {
  const std::size_t n = next.intervals();
  const RightSide r = right_side(next, params, config);
  const double inv_dxi2 = static_cast<double>(n) * static_cast<double>(n);
  std::vector<double> vX(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vX[i] = (next.X[i] - prev.X[i]) / dtau;
  Eigen::VectorXd F(2 * n);
  F[0] = (next.t - prev.t) / dtau - r.g;
  for (std::size_t i = 0; i < n; ++i) {
    F[1 + i] = (next.u[i] - prev.u[i]) / dtau - r.s.dx[i] * vX[i] - r.g * r.rhs_u[i];
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (config.freeze_mesh) {
      F[n + i] = vX[i];
    } else {
      F[n + i] = -(vX[i + 1] - 2.0 * vX[i] + vX[i - 1]) * inv_dxi2 -
                 r.g / config.epsilon * r.s.flux[i];
    }
  }
  return F;
}

namespace {

struct NewtonResult {
  bool converged = false;
  DaeVector y;
  int iterations = 0;
};

NewtonResult newton(const DaeVector& prev, double dtau, const ProblemParams& params,
                    const SchemeConfig& config) {
  const double beta = params.beta;
  auto residual = [&](const Eigen::VectorXd& z) {
    return step_residual(unpack(z, prev, beta), prev, dtau, params, config);
  };
  auto jacobian = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& F0) {
    const Eigen::Index m = z.size();
    Eigen::MatrixXd J(m, m);
    const std::size_t n = prev.intervals();
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd zp = z;
      double h = 1.5e-8 * std::max(std::abs(z[j]), 1e-3);
      const bool is_u = j >= 1 && j <= static_cast<Eigen::Index>(n);
      if (is_u && z[j] + h >= 1.0) h = -h;
      zp[j] += h;
      J.col(j) = (residual(zp) - F0) / h;
    }
    return J;
  };

  NewtonResult out;
  Eigen::VectorXd z = pack(prev);
  Eigen::VectorXd F = residual(z);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(jacobian(z, F));
  bool refreshed = false;
  double last_update = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= kNewtonMaxIter; ++it) {
    const Eigen::VectorXd dz = lu.solve(-F);
    if (!dz.allFinite()) return out;
    double s = 1.0;
    Eigen::VectorXd trial;
    bool ok = false;
    for (int k = 0; k < 12; ++k, s *= 0.5) {
      trial = z + s * dz;
      if (admissible(unpack(trial, prev, beta))) {
        ok = true;
        break;
      }
    }
    if (!ok) return out;
    double update = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      update = std::max(update, std::abs(s * dz[j]) / (1.0 + std::abs(trial[j])));
    }
    z = trial;
    F = residual(z);
    if (!F.allFinite()) return out;
    out.iterations = it;
    if (update < kNewtonTol && s == 1.0) {
      out.converged = true;
      out.y = unpack(z, prev, beta);
      return out;
    }
    if (!refreshed && (update > 0.5 * last_update || it == 6)) {
      lu.compute(jacobian(z, F));
      refreshed = true;
    }
    last_update = update;
  }
  return out;
}

}  // namespace

StepOutcome step(const DaeVector& y, double dtau, const ProblemParams& params,
                 const SchemeConfig& config) {
  StepOutcome out;
  out.dtau = dtau;
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
    try {
      NewtonResult r = newton(y, out.dtau, params, config);
      if (r.converged) {
        require_monotone(r.y.X);
        out.y = std::move(r.y);
        out.newton_iterations = r.iterations;
        out.halvings = halvings;
        return out;
      }
    } catch (const NumericalFailure&) {
      // quenched or tangled trial state; retry with a smaller step
    }
    out.dtau *= 0.5;
  }
  std::ostringstream msg;
  msg << "step failure: dtau halved " << kMaxHalvings << " times at t = " << y.t;
  throw NumericalFailure(msg.str());
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Steady: return "steady";
    case RunStatus::Quenched: return "quenched";
    case RunStatus::Horizon: return "horizon";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

namespace {

LedgerRow ledger_row(const DaeVector& y, double dtau, const ProblemParams& params,
                     const SchemeConfig& config) {
  LedgerRow row;
  const auto it = std::max_element(y.u.begin(), y.u.end());
  row.t = y.t;
  row.umax = *it;
  row.x_max = y.X[static_cast<std::size_t>(it - y.u.begin())];
  row.u_boundary = y.u.back();
  row.E = energy(y.u, y.X, params, y.t).total;
  row.K = nonlocal_gain(y.u, y.X, params).K;
  row.g = time_dilation(y.u, config.monitor_floor);
  row.dtau = dtau;
  return row;
}

}  // namespace

Trajectory integrate(const ProblemParams& params, const SchemeConfig& config, std::size_t M,
                     const std::optional<std::vector<double>>& u0) {
  Trajectory traj;
  traj.params = validate(params);
  traj.scheme = validate(config);
  auto [mesh, field] = initial_state(params, M, u0);
  DaeVector y{0.0, field.u, mesh.X};
  apply_robin(y, params.beta);

  auto snapshot = [&](std::size_t index) {
    traj.snapshots.push_back({index, y.t, y.X, y.u});
  };
  traj.ledger.push_back(ledger_row(y, 0.0, params, config));
  snapshot(0);

  double dtau = config.dtau;
  std::size_t accepted = 0;
  int steady_count = 0;
  int rejected_in_row = 0;
  const double guard = 1.0 - config.quench_guard;
  std::optional<RunStatus> status;
  if (traj.ledger.back().umax >= guard) status = RunStatus::Quenched;

  while (!status) {
    StepOutcome out;
    try {
      out = step(y, dtau, params, config);
    } catch (const NumericalFailure& e) {
      traj.message = e.what();
      status = RunStatus::Failed;
      break;
    }
    const double d_old = 1.0 - *std::max_element(y.u.begin(), y.u.end());
    const double d_new = 1.0 - *std::max_element(out.y.u.begin(), out.y.u.end());
    const double rel = std::abs(d_new - d_old) / d_old;
    if (rel > 2.0 * config.max_relative_change) {
      ++traj.rejected_steps;
      if (++rejected_in_row > 50) {
        traj.message = "step failure: relative change control did not settle";
        status = RunStatus::Failed;
        break;
      }
      dtau = out.dtau * std::max(0.1, 0.9 * config.max_relative_change / rel);
      continue;
    }
    rejected_in_row = 0;

    double rate = 0.0;
    for (std::size_t i = 0; i < y.u.size(); ++i) rate = std::max(rate, std::abs(out.y.u[i] - y.u[i]));
    rate /= out.y.t - y.t;
    y = std::move(out.y);
    ++accepted;
    traj.ledger.push_back(ledger_row(y, out.dtau, params, config));
    if (config.snapshot_every > 0 && accepted % config.snapshot_every == 0) snapshot(accepted);

    double factor = rel > 0.0 ? 0.9 * config.max_relative_change / rel : 2.0;
    factor = std::clamp(factor, 0.5, 2.0);
    if (out.newton_iterations > 6) factor = std::min(factor, 1.0);
    dtau = std::min(out.dtau * factor, config.dtau_max);

    steady_count = rate < config.steady_tol ? steady_count + 1 : 0;
    if (traj.ledger.back().umax >= guard) {
      status = RunStatus::Quenched;
    } else if (steady_count >= kSteadyRun) {
      status = RunStatus::Steady;
    } else if (y.t >= config.t_final) {
      status = RunStatus::Horizon;
    }
  }
  traj.status = *status;
  if (traj.snapshots.back().step != accepted || accepted == 0) {
    if (accepted > 0) snapshot(accepted);
  }
  traj.final_state = y;
  return traj;
}

}  // namespace memsq
