#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvopt/costs.hpp"
#include "tvopt/predict.hpp"

namespace tvopt {

/// alg4_approx is Alg4 with backward-difference time derivatives and the
/// exact Hessian, for oracles that lack exact time derivatives.
enum class Algorithm { gd, alg1, alg2, alg3, alg4, alg4_approx, euler2 };

std::string_view to_string(Algorithm a);
/// Throws ConfigError for an unknown name.
Algorithm parse_algorithm(std::string_view s);
/// Exact derivatives the algorithm needs from the oracle.
CapabilitySet required_capabilities(Algorithm a);

struct SolverConfig {
  Algorithm algorithm = Algorithm::gd;
  double alpha = 0.1;
  double epsilon = 0.3;
  double delta = 0.1;
  int updates_per_tick = 1;
  double t_end = 10.0;
  Vector x0;

  /// Throws ConfigError on a non-positive step, guard or interval, an empty
  /// or non-finite x0, or t_end < 0.
  void validate() const;
  /// Number of prediction-update ticks, round(t_end / delta).
  std::size_t tick_count() const;
};

/// State after tick k. Record 0 holds x0 with an identity branch.
struct StepRecord {
  std::size_t k = 0;
  double t = 0.0;
  Vector x;
  Vector x_pred;
  Branch branch = Branch::identity;
  double f = 0.0;
  std::optional<double> f_star;
  std::optional<double> err_f;
  std::optional<double> err_x;
  double grad_norm = 0.0;
};

struct Trajectory {
  SolverConfig config;
  std::string problem;
  std::vector<StepRecord> records;
  std::vector<std::string> warnings;
};

/// Thrown when the state stops being finite (or a Hessian solve fails). The
/// trajectory up to the last good tick travels with the exception.
class NumericAbort : public NumericError {
 public:
  NumericAbort(const std::string& what, Trajectory partial)
      : NumericError(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// x_pred - alpha * grad_at_pred.
Vector update_gd(VectorView x_pred, VectorView grad_at_pred, double alpha);

/// One prediction-update pass of the configured algorithm, independent of
/// the time grid. Holds a reference to the oracle.
class Tracker {
 public:
  /// Throws ConfigError for invalid settings and CapabilityError when the
  /// oracle lacks a derivative the algorithm needs.
  Tracker(const CostOracle& oracle, const SolverConfig& config);

  /// Prediction at (x, t_k). t_prev is the previous sample time and is
  /// required by alg2 and alg4_approx; without it they return identity.
  PredictionOutcome predict(VectorView x, double t_k, std::optional<double> t_prev) const;
  /// updates_per_tick gradient steps on f(., t_next).
  Vector update(VectorView x_pred, double t_next) const;

 private:
  const CostOracle& oracle_;
  SolverConfig config_;
};

/// Runs the loop on the grid t_k = k delta, k = 0..tick_count(). The optimum
/// oracle is optional; without it f_star, err_f and err_x stay empty.
Trajectory run(const CostOracle& oracle, const OptimumOracle* optimum, const SolverConfig& config);

enum class ErrorMetric { err_f, err_x };

struct ErrorSummary {
  double max_tail = 0.0;
  double mean_tail = 0.0;
  std::size_t tail_count = 0;
  std::optional<std::size_t> first_k_below;
};

/// Statistics over the last floor(tail_fraction * N) records. Throws
/// std::invalid_argument if that tail is empty or tail_fraction is outside
/// (0, 1], and MissingOptimumError if a record lacks the chosen metric.
ErrorSummary tracking_error_summary(const Trajectory& traj, double tail_fraction,
                                    std::optional<double> threshold = std::nullopt,
                                    ErrorMetric metric = ErrorMetric::err_f);

/// Earliest record k whose metric is strictly below threshold.
std::optional<std::size_t> first_k_below(const Trajectory& traj, double threshold,
                                         ErrorMetric metric = ErrorMetric::err_f);
std::optional<std::size_t> first_index_below(std::span<const double> values, double threshold);

/// The metric column of a trajectory, throwing MissingOptimumError on a gap.
std::vector<double> error_series(const Trajectory& traj, ErrorMetric metric = ErrorMetric::err_f);

}  // namespace tvopt
