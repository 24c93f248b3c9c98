#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "tvopt/costs.hpp"

namespace tvopt {

/// f(x, t) = 0.5 (x - 2 sin t)^2 + cos(3t) x, scalar x.
class ScalarTrackingCost final : public CostOracle {
 public:
  std::string name() const override { return "scalar-tracking"; }
  std::size_t dimension() const override { return 1; }
  CapabilitySet capabilities() const override { return {true, true, true, true}; }

  double value(VectorView x, double t) const override;
  Vector grad_x(VectorView x, double t) const override;
  double grad_t(VectorView x, double t) const override;
  Vector grad_xt(VectorView x, double t) const override;
  SymMatrix hess_xx(VectorView x, double t) const override;
  double grad_tt(VectorView x, double t) const override;
  std::optional<CurvatureBounds> declared_curvature() const override { return CurvatureBounds{1.0, 1.0}; }

  static double minimizer(double t);
  static double min_value(double t);
};

/// f(x, t) = 0.5 ||x - a sin(w t) 1||^2 in n dimensions.
class SeparableQuadraticTracker final : public CostOracle {
 public:
  SeparableQuadraticTracker(std::size_t n, double amplitude, double omega);

  std::string name() const override { return "quadratic-tracker"; }
  std::size_t dimension() const override { return n_; }
  CapabilitySet capabilities() const override { return {true, true, true, true}; }

  double value(VectorView x, double t) const override;
  Vector grad_x(VectorView x, double t) const override;
  double grad_t(VectorView x, double t) const override;
  Vector grad_xt(VectorView x, double t) const override;
  SymMatrix hess_xx(VectorView x, double t) const override;
  double grad_tt(VectorView x, double t) const override;
  std::optional<CurvatureBounds> declared_curvature() const override { return CurvatureBounds{1.0, 1.0}; }

  double target(double t) const;

 private:
  std::size_t n_;
  double amplitude_;
  double omega_;
};

/// f(x, t) = 0.5 x^T A x + b(t)^T x with b(t) = b0 + t b1 and A SPD.
/// Since b is affine in t, d_xt f = b1 is constant and d_tt f = 0.
class QuadraticDriftCost final : public CostOracle {
 public:
  QuadraticDriftCost(SymMatrix a, Vector b0, Vector b1);

  std::string name() const override { return b1_is_zero_ ? "time-invariant-quadratic" : "quadratic-drift"; }
  std::size_t dimension() const override { return a_.size(); }
  CapabilitySet capabilities() const override { return {true, true, true, true}; }

  double value(VectorView x, double t) const override;
  Vector grad_x(VectorView x, double t) const override;
  double grad_t(VectorView x, double t) const override;
  Vector grad_xt(VectorView x, double t) const override;
  SymMatrix hess_xx(VectorView x, double t) const override;
  double grad_tt(VectorView x, double t) const override;
  std::optional<CurvatureBounds> declared_curvature() const override { return curvature_; }

  const SymMatrix& matrix() const noexcept { return a_; }
  Vector linear_term(double t) const;
  OptimumPoint optimum(double t) const;

 private:
  SymMatrix a_;
  Cholesky chol_;
  Vector b0_;
  Vector b1_;
  CurvatureBounds curvature_;
  bool b1_is_zero_;
};

/// Random instance: A = G^T G / n + shift I with G standard normal, and b0,
/// b1 standard normal with b1 scaled by `drift`.
QuadraticDriftCost random_quadratic_drift(std::size_t n, std::uint64_t seed, double shift = 1.0,
                                          double drift = 1.0);

/// Closed-form optimum for the library problems.
class AnalyticOptimum final : public OptimumOracle {
 public:
  explicit AnalyticOptimum(std::shared_ptr<const CostOracle> cost);
  OptimumPoint at(double t, VectorView warm_start) const override;

 private:
  std::shared_ptr<const CostOracle> cost_;
};

using ParamMap = std::map<std::string, double>;

/// A problem addressed by string id plus numeric parameters:
///   scalar-tracking           (no parameters)
///   quadratic-tracker         n, amplitude, omega
///   quadratic-drift           n, seed, shift, drift
///   time-invariant-quadratic  n, seed, shift
struct ProblemSpec {
  std::string id = "scalar-tracking";
  ParamMap params;
};

struct Problem {
  std::shared_ptr<const CostOracle> cost;
  std::shared_ptr<const OptimumOracle> optimum;
};

/// Throws ConfigError for an unknown id or out-of-range parameter.
Problem make_problem(const ProblemSpec& spec);

}  // namespace tvopt
