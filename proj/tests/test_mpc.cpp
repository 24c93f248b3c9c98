#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tvopt/costs.hpp"
#include "tvopt/mpc.hpp"

using namespace tvopt;

namespace {

MpcConfig small_config(int h, double delta, double lambda) {
  MpcConfig c;
  c.Hp = c.Hu = h;
  c.delta = delta;
  c.lambda = lambda;
  c.sim_steps = 5;
  return c;
}

ReferencePath constant_path(std::size_t n, double x, double y) {
  ReferencePath p;
  p.samples.assign(n, {x, y});
  return p;
}

}  // namespace

TEST(SinePath, Endpoints) {
  const ReferencePath p = make_sine_path(400, 10);
  ASSERT_EQ(p.size(), 411u);
  EXPECT_DOUBLE_EQ(p.at(Axis::x, 0), -1.0);
  EXPECT_NEAR(p.at(Axis::y, 0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.at(Axis::x, 300), 0.5);
  EXPECT_NEAR(p.at(Axis::y, 300), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.at(Axis::x, 405), 1.0);  // clamped past the end
}

TEST(LowerOnes, MultiplyAndGram) {
  EXPECT_EQ(lower_ones_multiply(Vector{1, 2, 3}), (Vector{0, 1, 3}));
  EXPECT_EQ(lower_ones_transpose_multiply(Vector{1, 2, 3}), (Vector{5, 3, 0}));
  const SymMatrix g = lower_ones_gram(3);
  EXPECT_EQ(g(0, 0), 2.0);
  EXPECT_EQ(g(1, 0), 1.0);
  EXPECT_EQ(g(2, 2), 0.0);
}

TEST(MpcCost, HandEvaluatedExample) {
  const MpcConfig cfg = small_config(2, 1.0, 1.0);
  const ReferencePath path = constant_path(10, 1.0, 1.0);
  const MpcAxisCost f(Axis::x, cfg, path, [](std::size_t) { return 0.0; });
  EXPECT_DOUBLE_EQ(f.value(Vector{1, 0}, 0.0), 2.0);
}

TEST(MpcCost, ZeroOnTarget) {
  const MpcConfig cfg = small_config(4, 0.1, 0.1);
  const ReferencePath path = constant_path(10, 0.3, -0.2);
  const MpcAxisCost f(Axis::y, cfg, path, [](std::size_t) { return -0.2; });
  EXPECT_EQ(f.value(Vector(4, 0.0), 0.2), 0.0);
  EXPECT_EQ(f.capabilities().has_exact_grad_t, false);
  EXPECT_THROW(f.grad_t(Vector(4, 0.0), 0.0), CapabilityError);
}

TEST(MpcCost, GradientMatchesCentralDifferences) {
  const MpcConfig cfg = small_config(10, 0.1, 0.1);
  const ReferencePath path = make_sine_path(50, 10);
  const MpcAxisCost f(Axis::y, cfg, path, [](std::size_t k) { return 0.01 * static_cast<double>(k); });
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Vector u(10);
    for (double& v : u) v = 3 * normal(rng);
    const double t = 0.1 * (trial % 30);
    const Vector g = f.grad_x(u, t);
    const Vector fd = central_grad_x(f, u, t, 1e-4);
    for (std::size_t i = 0; i < u.size(); ++i)
      EXPECT_LE(std::abs(g[i] - fd[i]), 1e-8 * std::max({std::abs(g[i]), std::abs(fd[i]), 1.0}));
  }
}

TEST(MpcCost, CurvatureMatchesHessianSpectrum) {
  for (double lambda : {0.1, 1.0, 10.0}) {
    const MpcConfig cfg = small_config(10, 0.1, lambda);
    const ReferencePath path = make_sine_path(50, 10);
    const MpcAxisCost f(Axis::x, cfg, path, [](std::size_t) { return 0.0; });
    const EigenRange r = eigen_range(f.hess_xx(Vector(10, 0.0), 0.0));
    const auto c = *f.declared_curvature();
    EXPECT_NEAR(c.m, 2.0 / lambda, 1e-12);
    EXPECT_NEAR(r.min, c.m, 1e-10);
    EXPECT_NEAR(r.max, c.M, 1e-10);
  }
}

TEST(MpcCost, HorizonPastPathThrows) {
  const MpcConfig cfg = small_config(3, 0.1, 1.0);
  const ReferencePath path = constant_path(4, 0.0, 0.0);
  const MpcAxisCost f(Axis::x, cfg, path, [](std::size_t) { return 0.0; });
  EXPECT_NO_THROW(f.value(Vector(3, 0.0), 0.1));
  EXPECT_THROW(f.value(Vector(3, 0.0), 0.2), std::out_of_range);
}

TEST(MpcOptimum, OnTargetIsZero) {
  const MpcOptimum o = mpc_optimum(Axis::x, small_config(5, 0.1, 0.1), constant_path(10, 2.0, 0.0), 0, 2.0);
  for (double v : o.u_star) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(o.J_star, 0.0);
}

TEST(MpcOptimum, SingleStepHorizonCannotAct) {
  const MpcOptimum o = mpc_optimum(Axis::x, small_config(1, 0.1, 0.1), constant_path(10, 2.0, 0.0), 0, 0.0);
  EXPECT_EQ(o.u_star, Vector{0.0});
  EXPECT_DOUBLE_EQ(o.J_star, 4.0);
}

TEST(MpcOptimum, HandExampleAgainstGridSearch) {
  const MpcConfig cfg = small_config(2, 1.0, 1.0);
  const ReferencePath path = constant_path(10, 1.0, 1.0);
  const MpcOptimum o = mpc_optimum(Axis::x, cfg, path, 0, 0.0);
  // f = 1 + (1 - u0)^2 + u0^2 + u1^2, minimized at (0.5, 0)
  EXPECT_NEAR(o.u_star[0], 0.5, 1e-12);
  EXPECT_NEAR(o.u_star[1], 0.0, 1e-12);
  EXPECT_NEAR(o.J_star, 1.5, 1e-12);

  const MpcAxisCost f(Axis::x, cfg, path, [](std::size_t) { return 0.0; });
  double best = INFINITY;
  Vector arg(2);
  for (int i = -3000; i <= 3000; ++i)
    for (int j = -3000; j <= 3000; j += 10) {
      const Vector u{i * 1e-3, j * 1e-3};
      const double v = f.value(u, 0.0);
      if (v < best) {
        best = v;
        arg = u;
      }
    }
  EXPECT_NEAR(arg[0], o.u_star[0], 1e-3);
  EXPECT_NEAR(arg[1], o.u_star[1], 1e-2);
  EXPECT_GE(best, o.J_star);
  EXPECT_NEAR(best, o.J_star, 1e-5);
}

TEST(MpcOptimum, NormalEquationResidual) {
  const MpcConfig cfg = small_config(10, 0.1, 0.1);
  const ReferencePath path = make_sine_path(50, 10);
  for (std::size_t k = 0; k < 40; k += 7) {
    const MpcOptimum o = mpc_optimum(Axis::y, cfg, path, k, 0.3);
    const MpcAxisCost f(Axis::y, cfg, path, [](std::size_t) { return 0.3; });
    EXPECT_LE(norm2(f.grad_x(o.u_star, 0.1 * static_cast<double>(k))), 1e-10);
  }
}

TEST(ClosedLoop, RejectsExactTimeDerivativeAlgorithms) {
  const MpcConfig cfg = small_config(3, 0.1, 1.0);
  const ReferencePath path = make_sine_path(cfg.sim_steps, cfg.Hp);
  for (Algorithm a : {Algorithm::alg1, Algorithm::alg3, Algorithm::alg4, Algorithm::euler2}) {
    SolverConfig s;
    s.algorithm = a;
    s.x0 = {0.0};
    EXPECT_THROW(run_closed_loop(cfg, path, s), CapabilityError) << to_string(a);
  }
}

TEST(ClosedLoop, RobotAtRestOnFlatPathStays) {
  MpcConfig cfg = small_config(4, 0.1, 1.0);
  cfg.u_init = 0.0;
  cfg.x_h0 = 0.5;
  cfg.y_h0 = -0.5;
  const ReferencePath path = constant_path(20, 0.5, -0.5);
  SolverConfig s;
  s.algorithm = Algorithm::alg2;
  s.x0 = {0.0};
  const ClosedLoopResult r = run_closed_loop(cfg, path, s);
  for (const RobotPathRow& row : r.robot_path) {
    EXPECT_EQ(row.x_h, 0.5);
    EXPECT_EQ(row.y_h, -0.5);
  }
  for (const StepRecord& rec : r.traj_u1.records) EXPECT_EQ(*rec.err_x, 0.0);
}

TEST(ClosedLoop, DeterministicAndWellFormed) {
  MpcConfig cfg;
  cfg.sim_steps = 60;
  const ReferencePath path = make_sine_path(cfg.sim_steps, cfg.Hp);
  SolverConfig s;
  s.algorithm = Algorithm::alg4_approx;
  s.alpha = 0.5;
  s.epsilon = 0.03;
  const ClosedLoopResult a = run_closed_loop(cfg, path, s);
  const ClosedLoopResult b = run_closed_loop(cfg, path, s);
  ASSERT_EQ(a.robot_path.size(), 61u);
  ASSERT_EQ(a.traj_u1.records.size(), 60u);
  for (std::size_t k = 0; k < a.robot_path.size(); ++k) {
    EXPECT_EQ(a.robot_path[k].x_h, b.robot_path[k].x_h);
    EXPECT_EQ(a.robot_path[k].y_h, b.robot_path[k].y_h);
  }
  EXPECT_EQ(a.traj_u1.records[0].branch, Branch::identity);
  EXPECT_EQ(a.traj_u1.records[1].branch, Branch::identity);
  EXPECT_NE(a.traj_u1.records[2].branch, Branch::identity);
  // applied dynamics
  for (std::size_t k = 0; k + 1 < a.robot_path.size(); ++k)
    EXPECT_DOUBLE_EQ(a.robot_path[k + 1].x_h, a.robot_path[k].x_h + cfg.delta * a.traj_u1.records[k].x[0]);
}

TEST(MpcConfig, Validation) {
  MpcConfig c;
  EXPECT_NO_THROW(c.validate());
  c.Hu = 5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = MpcConfig{};
  c.lambda = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}
