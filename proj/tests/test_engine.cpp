#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "tvopt/engine.hpp"
#include "tvopt/problems.hpp"

using namespace tvopt;

namespace {

SolverConfig config(Algorithm a, Vector x0, double t_end = 10.0) {
  SolverConfig c;
  c.algorithm = a;
  c.alpha = 0.1;
  c.epsilon = 0.3;
  c.delta = 0.1;
  c.t_end = t_end;
  c.x0 = std::move(x0);
  return c;
}

Trajectory synthetic(const std::vector<double>& errors) {
  Trajectory t;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    StepRecord r;
    r.k = k;
    r.t = 0.1 * static_cast<double>(k);
    r.f_star = 0.0;
    r.err_f = errors[k];
    r.err_x = errors[k];
    t.records.push_back(r);
  }
  return t;
}

constexpr Algorithm kAll[] = {Algorithm::gd,   Algorithm::alg1,        Algorithm::alg2,  Algorithm::alg3,
                              Algorithm::alg4, Algorithm::alg4_approx, Algorithm::euler2};

}  // namespace

TEST(Algorithm, NamesRoundTrip) {
  for (Algorithm a : kAll) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_EQ(to_string(Algorithm::alg4_approx), "alg4-approx");
  EXPECT_THROW(parse_algorithm("alg5"), ConfigError);
}

TEST(SolverConfig, Validation) {
  SolverConfig c = config(Algorithm::gd, {1.0});
  EXPECT_NO_THROW(c.validate());
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = config(Algorithm::gd, {});
  EXPECT_THROW(c.validate(), ConfigError);
  c = config(Algorithm::gd, {1.0});
  c.updates_per_tick = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = config(Algorithm::gd, {1.0}, 5.0);
  EXPECT_EQ(c.tick_count(), 50u);
}

TEST(UpdateGd, Examples) {
  EXPECT_EQ(update_gd(Vector{1.925}, Vector{0.0}, 0.1), Vector{1.925});
  EXPECT_EQ(update_gd(Vector{1, 2}, Vector{10, -10}, 0.1), (Vector{0, 3}));
}

TEST(Run, GradientDescentHalvesOnUnitBowl) {
  const QuadraticDriftCost f(SymMatrix::identity(1), Vector{0.0}, Vector{0.0});
  const AnalyticOptimum opt(std::make_shared<QuadraticDriftCost>(f));
  SolverConfig c = config(Algorithm::gd, {1.0}, 2.0);
  c.alpha = 0.5;
  const Trajectory t = run(f, &opt, c);
  ASSERT_EQ(t.records.size(), 21u);
  for (const StepRecord& r : t.records) {
    EXPECT_EQ(r.x[0], std::ldexp(1.0, -static_cast<int>(r.k)));
    EXPECT_NEAR(*r.err_f, 0.5 * r.x[0] * r.x[0], 1e-300);
  }
}

TEST(Run, TimeGridAndRecordZero) {
  const ScalarTrackingCost f;
  const Trajectory t = run(f, nullptr, config(Algorithm::alg1, {100.0}, 3.0));
  ASSERT_EQ(t.records.size(), 31u);
  EXPECT_EQ(t.records[0].branch, Branch::identity);
  EXPECT_EQ(t.records[0].x, Vector{100.0});
  EXPECT_FALSE(t.records[0].f_star);
  for (const StepRecord& r : t.records) EXPECT_NEAR(r.t, 0.1 * static_cast<double>(r.k), 1e-12);
  EXPECT_EQ(t.problem, "scalar-tracking");
}

TEST(Run, Alg2AndApproxStartWithIdentity) {
  const ScalarTrackingCost f;
  for (Algorithm a : {Algorithm::alg2, Algorithm::alg4_approx}) {
    const Trajectory t = run(f, nullptr, config(a, {100.0}, 1.0));
    EXPECT_EQ(t.records[1].branch, Branch::identity) << to_string(a);
    EXPECT_EQ(t.records[2].branch, Branch::first_order_grad_t) << to_string(a);
  }
}

TEST(Run, CapabilityMismatchBeforeFirstStep) {
  class NoTime final : public CostOracle {
   public:
    std::string name() const override { return "no-time"; }
    std::size_t dimension() const override { return 1; }
    CapabilitySet capabilities() const override { return {}; }
    double value(VectorView x, double) const override { return 0.5 * x[0] * x[0]; }
    Vector grad_x(VectorView x, double) const override { return {x[0]}; }
  } f;
  for (Algorithm a : {Algorithm::alg1, Algorithm::alg3, Algorithm::alg4, Algorithm::alg4_approx, Algorithm::euler2})
    EXPECT_THROW(run(f, nullptr, config(a, {1.0})), CapabilityError) << to_string(a);
  EXPECT_NO_THROW(run(f, nullptr, config(Algorithm::alg2, {1.0})));
}

TEST(Run, DimensionMismatchIsConfigError) {
  const ScalarTrackingCost f;
  EXPECT_THROW(run(f, nullptr, config(Algorithm::gd, {1.0, 2.0})), ConfigError);
}

TEST(Run, DivergenceAbortsWithPartialTrajectory) {
  const QuadraticDriftCost f(SymMatrix::identity(1), Vector{0.0}, Vector{0.0});
  SolverConfig c = config(Algorithm::gd, {1.0}, 1000.0);
  c.alpha = 5.0;  // |1 - alpha| = 4 per step
  try {
    run(f, nullptr, c);
    FAIL() << "expected NumericAbort";
  } catch (const NumericAbort& e) {
    EXPECT_GT(e.partial().records.size(), 10u);
    EXPECT_LT(e.partial().records.size(), c.tick_count() + 1);
    for (const StepRecord& r : e.partial().records) EXPECT_TRUE(std::isfinite(r.f));
  }
}

TEST(Run, AlphaWarning) {
  const ScalarTrackingCost f;
  SolverConfig c = config(Algorithm::gd, {1.0}, 0.5);
  EXPECT_TRUE(run(f, nullptr, c).warnings.empty());
  c.alpha = 0.6;
  EXPECT_EQ(run(f, nullptr, c).warnings.size(), 1u);
}

TEST(Run, Deterministic) {
  const ScalarTrackingCost f;
  const AnalyticOptimum opt(std::make_shared<ScalarTrackingCost>());
  for (Algorithm a : kAll) {
    const Trajectory t1 = run(f, &opt, config(a, {100.0}, 5.0));
    const Trajectory t2 = run(f, &opt, config(a, {100.0}, 5.0));
    ASSERT_EQ(t1.records.size(), t2.records.size());
    for (std::size_t i = 0; i < t1.records.size(); ++i) {
      ASSERT_EQ(std::memcmp(t1.records[i].x.data(), t2.records[i].x.data(), sizeof(double)), 0);
      ASSERT_EQ(t1.records[i].branch, t2.records[i].branch);
    }
  }
}

TEST(Run, StaticProblemErrorVanishes) {
  const Problem p = make_problem({"time-invariant-quadratic", {{"n", 4}, {"seed", 9}}});
  const auto curv = *p.cost->declared_curvature();
  for (Algorithm a : kAll) {
    SolverConfig c = config(a, Vector(4, 3.0), 20.0);
    c.alpha = 1.0 / (2.0 * curv.M);
    const Trajectory t = run(*p.cost, p.optimum.get(), c);
    EXPECT_LE(*t.records.back().err_f, 1e-12) << to_string(a);
    for (std::size_t k = 1; k < t.records.size(); ++k)
      ASSERT_EQ(t.records[k].x_pred, t.records[k - 1].x) << to_string(a);
  }
}

TEST(Run, UpdateStepNeverIncreasesCost) {
  const ScalarTrackingCost f;
  for (Algorithm a : kAll) {
    const Trajectory t = run(f, nullptr, config(a, {100.0}, 10.0));
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      const StepRecord& r = t.records[k];
      EXPECT_LE(r.f, f.value(r.x_pred, r.t) + 1e-9) << to_string(a) << " k=" << k;
    }
  }
}

TEST(Run, PolyakLojasiewiczSandwich) {
  const Problem p = make_problem({"quadratic-drift", {{"n", 5}, {"seed", 3}}});
  const auto curv = *p.cost->declared_curvature();
  for (Algorithm a : kAll) {
    SolverConfig c = config(a, Vector(5, 2.0), 5.0);
    c.alpha = 1.0 / (2.0 * curv.M);
    const Trajectory t = run(*p.cost, p.optimum.get(), c);
    for (const StepRecord& r : t.records) {
      const double g2 = r.grad_norm * r.grad_norm;
      EXPECT_LE(g2 / (2 * curv.M), *r.err_f * (1 + 1e-9) + 1e-12);
      EXPECT_GE(g2 / (2 * curv.m), *r.err_f * (1 - 1e-9) - 1e-12);
      EXPECT_GE(*r.err_f, -1e-9);
    }
  }
}

TEST(Run, MoreUpdatesTrackBetter) {
  const ScalarTrackingCost f;
  const AnalyticOptimum opt(std::make_shared<ScalarTrackingCost>());
  SolverConfig c = config(Algorithm::gd, {100.0}, 10.0);
  const double one = tracking_error_summary(run(f, &opt, c), 0.5).mean_tail;
  c.updates_per_tick = 5;
  const double five = tracking_error_summary(run(f, &opt, c), 0.5).mean_tail;
  EXPECT_LT(five, one);
}

TEST(Tracker, PredictAndUpdateMatchRun) {
  const ScalarTrackingCost f;
  const SolverConfig c = config(Algorithm::alg3, {100.0}, 1.0);
  const Trajectory t = run(f, nullptr, c);
  const Tracker tracker(f, c);
  Vector x = c.x0;
  for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
    const double tk = 0.1 * static_cast<double>(k);
    const PredictionOutcome p = tracker.predict(x, tk, std::nullopt);
    x = tracker.update(p.x_pred, 0.1 * static_cast<double>(k + 1));
    ASSERT_EQ(x, t.records[k + 1].x);
  }
}

TEST(Summary, ConstantError) {
  const ErrorSummary s = tracking_error_summary(synthetic(std::vector<double>(10, 1e-3)), 0.5);
  EXPECT_EQ(s.max_tail, 1e-3);
  EXPECT_DOUBLE_EQ(s.mean_tail, 1e-3);
  EXPECT_EQ(s.tail_count, 5u);
}

TEST(Summary, FirstCrossing) {
  std::vector<double> e(200);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = 0.5 * std::exp(-0.0245 * static_cast<double>(k));
  const Trajectory t = synthetic(e);
  // 0.5 exp(-0.0245 k) < 0.03 first at k = 115
  EXPECT_EQ(first_k_below(t, 0.03), 115u);
  EXPECT_EQ(tracking_error_summary(t, 0.5, 0.03).first_k_below, 115u);
  EXPECT_FALSE(first_k_below(t, 1e-9));
  EXPECT_EQ(first_index_below(std::vector<double>{3, 2, 1}, 2.5), 1u);
}

TEST(Summary, EmptyTailAndMissingOptimum) {
  EXPECT_THROW(tracking_error_summary(synthetic({1, 2, 3}), 0.2), std::invalid_argument);
  EXPECT_THROW(tracking_error_summary(synthetic({1, 2, 3}), 0.0), std::invalid_argument);
  Trajectory t = synthetic({1, 2, 3});
  t.records[1].err_f.reset();
  EXPECT_THROW(tracking_error_summary(t, 1.0), MissingOptimumError);
  EXPECT_NO_THROW(tracking_error_summary(t, 1.0, std::nullopt, ErrorMetric::err_x));
}
