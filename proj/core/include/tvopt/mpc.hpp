#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "tvopt/costs.hpp"
#include "tvopt/engine.hpp"

namespace tvopt {

enum class Axis { x, y };

std::string_view to_string(Axis a);

/// Receding-horizon tracking for a planar point with single-integrator
/// dynamics p(k+1) = p(k) + delta u(k) on each axis.
struct MpcConfig {
  int Hp = 10;
  int Hu = 10;
  /// The control penalty is (1/lambda) ||u||^2.
  double lambda = 10.0;
  double delta = 0.1;
  int sim_steps = 400;
  double x_h0 = 0.0;
  double y_h0 = 0.0;
  double u_init = 10.0;

  /// Throws ConfigError unless Hp = Hu >= 1, lambda > 0, delta > 0 and sim_steps >= 1.
  void validate() const;
  double weight() const { return 1.0 / lambda; }
};

struct ReferencePath {
  std::vector<std::array<double, 2>> samples;

  double at(Axis a, std::size_t k) const { return samples.at(k)[a == Axis::x ? 0 : 1]; }
  std::size_t size() const noexcept { return samples.size(); }
};

/// s_k = -1 + 2k / sim_steps clamped to 1, r = (s, sin(pi s)), with
/// sim_steps + horizon + 1 samples.
ReferencePath make_sine_path(int sim_steps, int horizon);

/// Position on one axis at tick k.
using PositionProvider = std::function<double(std::size_t k)>;

/// f(u, t_k) = ||r_k - p_k 1 - delta L u||^2 + (1/lambda) ||u||^2 on one axis,
/// where r_k is the horizon slice of the path starting at tick k and L is the
/// strictly lower triangular matrix of ones. t maps to tick floor(t / delta).
/// Time derivatives are not exact; the Hessian is.
class MpcAxisCost final : public CostOracle {
 public:
  MpcAxisCost(Axis axis, const MpcConfig& cfg, const ReferencePath& path, PositionProvider position);

  std::string name() const override;
  std::size_t dimension() const override { return static_cast<std::size_t>(cfg_.Hu); }
  CapabilitySet capabilities() const override { return {false, false, true, false}; }

  double value(VectorView u, double t) const override;
  Vector grad_x(VectorView u, double t) const override;
  SymMatrix hess_xx(VectorView u, double t) const override;
  std::optional<CurvatureBounds> declared_curvature() const override { return curvature_; }

  std::size_t tick_of(double t) const;

 private:
  Vector residual(VectorView u, std::size_t k) const;

  Axis axis_;
  MpcConfig cfg_;
  const ReferencePath& path_;
  PositionProvider position_;
  SymMatrix hessian_;
  CurvatureBounds curvature_;
};

/// L u for the strictly lower triangular ones matrix (prefix sums).
Vector lower_ones_multiply(VectorView u);
/// L^T v (suffix sums).
Vector lower_ones_transpose_multiply(VectorView v);
/// L^T L as a dense symmetric matrix.
SymMatrix lower_ones_gram(std::size_t n);

struct MpcOptimum {
  Vector u_star;
  double J_star = 0.0;
};

/// Minimizer of the axis cost at tick k with position p_k, from
/// (delta^2 L^T L + (1/lambda) I) u = delta L^T (r - p_k 1).
MpcOptimum mpc_optimum(Axis axis, const MpcConfig& cfg, const ReferencePath& path, std::size_t k, double p_k);

struct RobotPathRow {
  std::size_t k = 0;
  double t = 0.0;
  double x_h = 0.0;
  double y_h = 0.0;
  double r_x = 0.0;
  double r_y = 0.0;
};

struct ClosedLoopResult {
  Trajectory traj_u1;
  Trajectory traj_u2;
  std::vector<RobotPathRow> robot_path;
};

/// Closed loop over sim_steps ticks. At tick k each axis predicts from the
/// decision of tick k-1 (identity at k = 0), takes the update steps on the
/// tick-k cost, records u-error ||u - u*|| in err_x and J - J* in err_f, then
/// applies u[0]. Only gd, alg2 and alg4-approx are accepted; delta, x0 and
/// t_end of the solver configs are taken from `cfg`.
ClosedLoopResult run_closed_loop(const MpcConfig& cfg, const ReferencePath& path, const SolverConfig& solver_x,
                                 const SolverConfig& solver_y);
ClosedLoopResult run_closed_loop(const MpcConfig& cfg, const ReferencePath& path, const SolverConfig& solver);

}  // namespace tvopt
