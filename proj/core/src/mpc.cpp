#include "tvopt/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace tvopt {

std::string_view to_string(Axis a) { return a == Axis::x ? "x" : "y"; }

void MpcConfig::validate() const {
  if (Hp < 1) throw ConfigError("mpc: Hp must be at least 1");
  if (Hu != Hp) throw ConfigError("mpc: Hu must equal Hp");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("mpc: lambda must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("mpc: delta must be positive");
  if (sim_steps < 1) throw ConfigError("mpc: sim_steps must be at least 1");
  if (!std::isfinite(x_h0) || !std::isfinite(y_h0) || !std::isfinite(u_init))
    throw ConfigError("mpc: initial state must be finite");
}

ReferencePath make_sine_path(int sim_steps, int horizon) {
  if (sim_steps < 1 || horizon < 1) throw ConfigError("make_sine_path: sim_steps and horizon must be positive");
  ReferencePath path;
  const int n = sim_steps + horizon + 1;
  path.samples.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = std::min(1.0, -1.0 + 2.0 * k / sim_steps);
    path.samples.push_back({s, std::sin(std::numbers::pi * s)});
  }
  return path;
}

Vector lower_ones_multiply(VectorView u) {
  Vector out(u.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = acc;
    acc += u[i];
  }
  return out;
}

Vector lower_ones_transpose_multiply(VectorView v) {
  Vector out(v.size());
  double acc = 0.0;
  for (std::size_t j = v.size(); j-- > 0;) {
    out[j] = acc;
    acc += v[j];
  }
  return out;
}

SymMatrix lower_ones_gram(std::size_t n) {
  // (L^T L)_{ij} = #{r : r > max(i, j)} = n - 1 - max(i, j)
  SymMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) g.at(i, j) = static_cast<double>(n - 1 - i);
  return g;
}

namespace {

SymMatrix normal_matrix(const MpcConfig& cfg, double scale) {
  // scale * (delta^2 L^T L + w I)
  const auto n = static_cast<std::size_t>(cfg.Hu);
  SymMatrix a = lower_ones_gram(n);
  const double d2 = cfg.delta * cfg.delta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a.at(i, j) = scale * (d2 * a(i, j) + (i == j ? cfg.weight() : 0.0));
  return a;
}

Vector horizon_residual(const MpcConfig& cfg, const ReferencePath& path, Axis axis, std::size_t k, double p_k,
                        VectorView u) {
  const auto h = static_cast<std::size_t>(cfg.Hp);
  if (k + h > path.size())
    throw std::out_of_range("mpc: horizon at tick " + std::to_string(k) + " runs past the reference path");
  Vector res = lower_ones_multiply(u);
  for (std::size_t i = 0; i < h; ++i) res[i] = path.at(axis, k + i) - p_k - cfg.delta * res[i];
  return res;
}

}  // namespace

MpcAxisCost::MpcAxisCost(Axis axis, const MpcConfig& cfg, const ReferencePath& path, PositionProvider position)
    : axis_(axis), cfg_(cfg), path_(path), position_(std::move(position)), hessian_(1), curvature_{0.0, 0.0} {
  cfg_.validate();
  hessian_ = normal_matrix(cfg_, 2.0);
  const double lmax = eigen_range(lower_ones_gram(static_cast<std::size_t>(cfg_.Hu))).max;
  curvature_ = {2.0 * cfg_.weight(), 2.0 * cfg_.weight() + 2.0 * cfg_.delta * cfg_.delta * lmax};
}

std::string MpcAxisCost::name() const { return "mpc-" + std::string(to_string(axis_)); }

std::size_t MpcAxisCost::tick_of(double t) const {
  if (!(t >= 0.0)) throw NumericError("mpc: negative time");
  return static_cast<std::size_t>(std::floor(t / cfg_.delta + 1e-6));
}

Vector MpcAxisCost::residual(VectorView u, std::size_t k) const {
  if (u.size() != dimension()) throw DimensionError("mpc: expected dimension " + std::to_string(dimension()));
  return horizon_residual(cfg_, path_, axis_, k, position_(k), u);
}

double MpcAxisCost::value(VectorView u, double t) const {
  const Vector res = residual(u, tick_of(t));
  return squared_norm(res) + cfg_.weight() * squared_norm(u);
}

Vector MpcAxisCost::grad_x(VectorView u, double t) const {
  const Vector res = residual(u, tick_of(t));
  Vector g = lower_ones_transpose_multiply(res);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -2.0 * cfg_.delta * g[i] + 2.0 * cfg_.weight() * u[i];
  return g;
}

SymMatrix MpcAxisCost::hess_xx(VectorView u, double) const {
  if (u.size() != dimension()) throw DimensionError("mpc: expected dimension " + std::to_string(dimension()));
  return hessian_;
}

MpcOptimum mpc_optimum(Axis axis, const MpcConfig& cfg, const ReferencePath& path, std::size_t k, double p_k) {
  cfg.validate();
  const auto h = static_cast<std::size_t>(cfg.Hu);
  const Vector zero(h, 0.0);
  Vector rhs = lower_ones_transpose_multiply(horizon_residual(cfg, path, axis, k, p_k, zero));
  for (double& v : rhs) v *= cfg.delta;
  MpcOptimum out;
  out.u_star = spd_solve(normal_matrix(cfg, 1.0), rhs);
  out.J_star = squared_norm(horizon_residual(cfg, path, axis, k, p_k, out.u_star)) +
               cfg.weight() * squared_norm(out.u_star);
  return out;
}

namespace {

void require_mpc_algorithm(Algorithm a) {
  if (a != Algorithm::gd && a != Algorithm::alg2 && a != Algorithm::alg4_approx)
    throw CapabilityError("mpc: " + std::string(to_string(a)) +
                          " needs exact time derivatives; use gd, alg2 or alg4-approx");
}

struct AxisLoop {
  Axis axis;
  std::vector<double> positions;
  std::unique_ptr<MpcAxisCost> cost;
  std::unique_ptr<Tracker> tracker;
  Trajectory traj;
  Vector u;
};

}  // namespace

ClosedLoopResult run_closed_loop(const MpcConfig& cfg, const ReferencePath& path, const SolverConfig& solver_x,
                                 const SolverConfig& solver_y) {
  cfg.validate();
  require_mpc_algorithm(solver_x.algorithm);
  require_mpc_algorithm(solver_y.algorithm);
  const auto steps = static_cast<std::size_t>(cfg.sim_steps);
  const auto h = static_cast<std::size_t>(cfg.Hp);
  if (path.size() < steps + h) throw ConfigError("mpc: reference path shorter than sim_steps + Hp");

  AxisLoop loops[2];
  const SolverConfig* solvers[2] = {&solver_x, &solver_y};
  for (int a = 0; a < 2; ++a) {
    AxisLoop& l = loops[a];
    l.axis = a == 0 ? Axis::x : Axis::y;
    l.positions.reserve(steps + 1);
    l.positions.push_back(a == 0 ? cfg.x_h0 : cfg.y_h0);
    const std::vector<double>* pos = &l.positions;
    l.cost = std::make_unique<MpcAxisCost>(l.axis, cfg, path, [pos](std::size_t k) {
      if (k >= pos->size()) throw std::out_of_range("mpc: position requested for a future tick");
      return (*pos)[k];
    });
    SolverConfig sc = *solvers[a];
    sc.delta = cfg.delta;
    sc.x0.assign(h, cfg.u_init);
    sc.t_end = static_cast<double>(steps - 1) * cfg.delta;
    l.tracker = std::make_unique<Tracker>(*l.cost, sc);
    l.traj.config = sc;
    l.traj.problem = l.cost->name();
    l.traj.records.reserve(steps);
    l.u = sc.x0;
  }

  ClosedLoopResult out;
  out.robot_path.reserve(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_k = static_cast<double>(k) * cfg.delta;
    for (AxisLoop& l : loops) {
      try {
        PredictionOutcome pred = predict_identity(l.u);
        if (k >= 1) {
          std::optional<double> t_prev;
          if (k >= 2) t_prev = static_cast<double>(k - 2) * cfg.delta;
          pred = l.tracker->predict(l.u, static_cast<double>(k - 1) * cfg.delta, t_prev);
        }
        l.u = l.tracker->update(pred.x_pred, t_k);
        if (!all_finite(l.u)) throw NumericError("mpc: control is not finite at tick " + std::to_string(k));
        const MpcOptimum opt = mpc_optimum(l.axis, cfg, path, k, l.positions[k]);
        StepRecord r;
        r.k = k;
        r.t = t_k;
        r.x = l.u;
        r.x_pred = std::move(pred.x_pred);
        r.branch = pred.branch;
        r.f = l.cost->value(l.u, t_k);
        r.grad_norm = norm2(l.cost->grad_x(l.u, t_k));
        if (!std::isfinite(r.f)) throw NumericError("mpc: cost is not finite at tick " + std::to_string(k));
        r.f_star = opt.J_star;
        r.err_f = r.f - opt.J_star;
        r.err_x = norm2(subtract(l.u, opt.u_star));
        l.traj.records.push_back(std::move(r));
      } catch (const NumericError& e) {
        throw NumericAbort(e.what(), std::move(l.traj));
      } catch (const NotSpdError& e) {
        throw NumericAbort(e.what(), std::move(l.traj));
      }
    }
    out.robot_path.push_back({k, t_k, loops[0].positions[k], loops[1].positions[k], path.at(Axis::x, k),
                              path.at(Axis::y, k)});
    for (AxisLoop& l : loops) l.positions.push_back(l.positions[k] + cfg.delta * l.u[0]);
  }
  const double t_end = static_cast<double>(steps) * cfg.delta;
  out.robot_path.push_back({steps, t_end, loops[0].positions[steps], loops[1].positions[steps],
                            path.at(Axis::x, steps), path.at(Axis::y, steps)});
  out.traj_u1 = std::move(loops[0].traj);
  out.traj_u2 = std::move(loops[1].traj);
  return out;
}

ClosedLoopResult run_closed_loop(const MpcConfig& cfg, const ReferencePath& path, const SolverConfig& solver) {
  return run_closed_loop(cfg, path, solver, solver);
}

}  // namespace tvopt
