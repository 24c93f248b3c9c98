#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvopt/linalg.hpp"

namespace tvopt {

/// A decision variable paired with a sample time.
struct EvalPoint {
  Vector x;
  double t = 0.0;

  /// Throws NumericError unless every component is finite and t >= 0.
  void validate() const;
};

/// Which derivatives an oracle computes analytically.
struct CapabilitySet {
  bool has_exact_grad_t = false;
  bool has_exact_grad_xt = false;
  bool has_exact_hessian = false;
  bool has_exact_grad_tt = false;

  /// True when every flag set in `need` is also set here.
  bool covers(const CapabilitySet& need) const noexcept;
};

struct CostEvaluation {
  double value = 0.0;
  Vector grad_x;
  std::optional<double> grad_t;
  std::optional<Vector> grad_xt;
  std::optional<SymMatrix> hess_xx;
};

/// Bounds on curvature that hold for every (x, t).
struct CurvatureBounds {
  double m;
  double M;
};

enum class ConstantsProvenance { declared, empirical };

/// Strong convexity m, gradient Lipschitz M, and bounds K1, K2, K3 on
/// |d_t f|, ||d_xt f|| and |d_tt f|.
struct RegularityConstants {
  double m = 1.0;
  double M = 1.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  ConstantsProvenance provenance = ConstantsProvenance::declared;

  /// Throws ConfigError unless 0 < m <= M and all K >= 0.
  void validate() const;
};

std::string_view to_string(ConstantsProvenance p);

/// A time-varying cost f(x, t). Implementations are pure: evaluation never
/// mutates observable state, so one oracle may be shared between threads.
///
/// The optional derivatives throw CapabilityError unless the matching flag in
/// capabilities() is set.
class CostOracle {
 public:
  virtual ~CostOracle() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual CapabilitySet capabilities() const = 0;

  virtual double value(VectorView x, double t) const = 0;
  virtual Vector grad_x(VectorView x, double t) const = 0;

  virtual double grad_t(VectorView x, double t) const;
  virtual Vector grad_xt(VectorView x, double t) const;
  virtual SymMatrix hess_xx(VectorView x, double t) const;
  virtual double grad_tt(VectorView x, double t) const;

  /// Global m and M when they are known in closed form.
  virtual std::optional<CurvatureBounds> declared_curvature() const { return std::nullopt; }
};

enum class Fallback { none, finite_difference };

/// Selects the optional derivatives that eval() should fill in.
struct EvalRequest {
  bool grad_t = false;
  bool grad_xt = false;
  bool hessian = false;
  Fallback fallback = Fallback::none;
};

/// Evaluates f and its gradient, plus whichever derivatives `want` asks for.
/// Requested derivatives the oracle lacks are left empty unless the request
/// allows a finite-difference fallback. Throws DimensionError on a size
/// mismatch and NumericError on non-finite input or output.
CostEvaluation eval(const CostOracle& oracle, const EvalPoint& p, const EvalRequest& want = {});

/// Backward difference (f(x, t_k) - f(x, t_km1)) / (t_k - t_km1).
double fd_grad_t(const CostOracle& oracle, VectorView x, double t_k, double t_km1);

/// Backward difference of the x-gradient at a fixed x.
Vector fd_grad_xt(const CostOracle& oracle, VectorView x, double t_k, double t_km1);

// Central-difference estimates used for fallbacks and derivative checks.
double central_grad_t(const CostOracle& oracle, VectorView x, double t, double h = 1e-5);
Vector central_grad_xt(const CostOracle& oracle, VectorView x, double t, double h = 1e-5);
Vector central_grad_x(const CostOracle& oracle, VectorView x, double t, double h = 1e-6);
SymMatrix central_hessian(const CostOracle& oracle, VectorView x, double t, double h = 1e-5);
double central_grad_tt(const CostOracle& oracle, VectorView x, double t, double h = 1e-4);

struct EstimateOptions {
  /// K values are scaled by (1 + margin), m by 1 / (1 + margin), M by (1 + margin).
  double margin = 0.0;
  /// Permit finite differences for derivatives the oracle does not supply.
  bool allow_finite_difference = false;
};

/// Estimates regularity constants as suprema over the given points. m and M
/// come from declared curvature when the oracle has it, otherwise from the
/// Hessian spectrum at each point.
RegularityConstants estimate_constants(const CostOracle& oracle, std::span<const EvalPoint> points,
                                       const EstimateOptions& options = {});

struct OptimumPoint {
  Vector x;
  double value = 0.0;
};

/// Supplies x*(t) and f*(t) for computing tracking errors.
class OptimumOracle {
 public:
  virtual ~OptimumOracle() = default;
  /// `warm_start` is a hint (typically the previous minimizer) and may be empty.
  virtual OptimumPoint at(double t, VectorView warm_start) const = 0;
};

/// Reference optimum from an inner gradient-descent solve run until
/// ||grad_x f|| <= tolerance, with Armijo backtracking.
class InnerSolverOptimum final : public OptimumOracle {
 public:
  explicit InnerSolverOptimum(const CostOracle& oracle, double tolerance = 1e-10,
                              int max_iterations = 200000);
  OptimumPoint at(double t, VectorView warm_start) const override;

 private:
  const CostOracle& oracle_;
  double tolerance_;
  int max_iterations_;
};

}  // namespace tvopt
