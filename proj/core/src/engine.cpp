#include "tvopt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tvopt {

namespace {

constexpr Algorithm kAlgorithms[] = {Algorithm::gd,   Algorithm::alg1,        Algorithm::alg2,  Algorithm::alg3,
                                     Algorithm::alg4, Algorithm::alg4_approx, Algorithm::euler2};

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::gd: return "gd";
    case Algorithm::alg1: return "alg1";
    case Algorithm::alg2: return "alg2";
    case Algorithm::alg3: return "alg3";
    case Algorithm::alg4: return "alg4";
    case Algorithm::alg4_approx: return "alg4-approx";
    case Algorithm::euler2: return "euler2";
  }
  return "gd";
}

Algorithm parse_algorithm(std::string_view s) {
  for (Algorithm a : kAlgorithms)
    if (to_string(a) == s) return a;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

CapabilitySet required_capabilities(Algorithm a) {
  switch (a) {
    case Algorithm::gd:
    case Algorithm::alg2: return {};
    case Algorithm::alg1: return {true, false, false, false};
    case Algorithm::alg3: return {true, true, false, false};
    case Algorithm::alg4: return {true, true, true, false};
    case Algorithm::alg4_approx: return {false, false, true, false};
    case Algorithm::euler2: return {false, true, true, false};
  }
  return {};
}

void SolverConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(alpha)) throw ConfigError("alpha must be positive");
  if (!positive(epsilon)) throw ConfigError("epsilon must be positive");
  if (!positive(delta)) throw ConfigError("delta must be positive");
  if (updates_per_tick < 1) throw ConfigError("updates_per_tick must be at least 1");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be non-negative");
  if (x0.empty()) throw ConfigError("x0 must not be empty");
  if (!all_finite(x0)) throw ConfigError("x0 must be finite");
}

std::size_t SolverConfig::tick_count() const { return static_cast<std::size_t>(std::llround(t_end / delta)); }

Vector update_gd(VectorView x_pred, VectorView grad_at_pred, double alpha) {
  return axpy(-alpha, grad_at_pred, x_pred);
}

Tracker::Tracker(const CostOracle& oracle, const SolverConfig& config) : oracle_(oracle), config_(config) {
  config_.validate();
  if (config_.x0.size() != oracle_.dimension())
    throw ConfigError("x0 has dimension " + std::to_string(config_.x0.size()) + ", problem has " +
                      std::to_string(oracle_.dimension()));
  if (!oracle_.capabilities().covers(required_capabilities(config_.algorithm)))
    throw CapabilityError(std::string(to_string(config_.algorithm)) + " needs derivatives that " + oracle_.name() +
                          " does not provide");
}

PredictionOutcome Tracker::predict(VectorView x, double t_k, std::optional<double> t_prev) const {
  const double d = config_.delta;
  const double eps = config_.epsilon;
  switch (config_.algorithm) {
    case Algorithm::gd: return predict_identity(x);
    case Algorithm::alg1:
      return predict_alg1(x, oracle_.grad_x(x, t_k), oracle_.grad_t(x, t_k), d, eps);
    case Algorithm::alg2:
      if (!t_prev) return predict_identity(x);
      return predict_alg2(x, oracle_.grad_x(x, t_k), oracle_.value(x, t_k), oracle_.value(x, *t_prev), d, eps);
    case Algorithm::alg3:
      return predict_alg3(x, oracle_.grad_x(x, t_k), oracle_.grad_t(x, t_k), oracle_.grad_xt(x, t_k), d, eps);
    case Algorithm::alg4:
      return predict_alg4(x, oracle_.grad_x(x, t_k), oracle_.grad_t(x, t_k), oracle_.grad_xt(x, t_k),
                          [&] { return oracle_.hess_xx(x, t_k); }, d, eps);
    case Algorithm::alg4_approx: {
      if (!t_prev) return predict_identity(x);
      const Vector g = oracle_.grad_x(x, t_k);
      if (norm2(g) >= eps) return predict_alg1(x, g, fd_grad_t(oracle_, x, t_k, *t_prev), d, eps);
      return predict_euler_second_order(x, fd_grad_xt(oracle_, x, t_k, *t_prev), oracle_.hess_xx(x, t_k), d);
    }
    case Algorithm::euler2:
      return predict_euler_second_order(x, oracle_.grad_xt(x, t_k), oracle_.hess_xx(x, t_k), d);
  }
  return predict_identity(x);
}

Vector Tracker::update(VectorView x_pred, double t_next) const {
  Vector x(x_pred.begin(), x_pred.end());
  for (int i = 0; i < config_.updates_per_tick; ++i) x = update_gd(x, oracle_.grad_x(x, t_next), config_.alpha);
  return x;
}

namespace {

StepRecord make_record(const CostOracle& oracle, const OptimumOracle* optimum, std::size_t k, double t, Vector x,
                       PredictionOutcome pred, Vector& x_star_hint) {
  StepRecord r;
  r.k = k;
  r.t = t;
  r.f = oracle.value(x, t);
  r.grad_norm = norm2(oracle.grad_x(x, t));
  if (!std::isfinite(r.f) || !std::isfinite(r.grad_norm)) throw NumericError("non-finite cost at tick " + std::to_string(k));
  if (optimum) {
    OptimumPoint opt = optimum->at(t, x_star_hint);
    r.f_star = opt.value;
    r.err_f = r.f - opt.value;
    r.err_x = norm2(subtract(x, opt.x));
    x_star_hint = std::move(opt.x);
  }
  r.x = std::move(x);
  r.x_pred = std::move(pred.x_pred);
  r.branch = pred.branch;
  return r;
}

}  // namespace

Trajectory run(const CostOracle& oracle, const OptimumOracle* optimum, const SolverConfig& config) {
  const Tracker tracker(oracle, config);
  Trajectory traj;
  traj.config = config;
  traj.problem = oracle.name();

  if (const auto curv = oracle.declared_curvature()) {
    if (config.alpha > 1.0 / (2.0 * curv->M)) {
      std::ostringstream os;
      os << "alpha = " << config.alpha << " exceeds 1/(2M) = " << 1.0 / (2.0 * curv->M);
      traj.warnings.push_back(os.str());
    }
  } else {
    traj.warnings.push_back("alpha not checked against 1/(2M): problem declares no curvature bounds");
  }

  const std::size_t n_ticks = config.tick_count();
  traj.records.reserve(n_ticks + 1);
  Vector hint;
  Vector x = config.x0;
  try {
    traj.records.push_back(make_record(oracle, optimum, 0, 0.0, x, predict_identity(x), hint));
    for (std::size_t k = 0; k < n_ticks; ++k) {
      const double t_k = static_cast<double>(k) * config.delta;
      const double t_next = static_cast<double>(k + 1) * config.delta;
      std::optional<double> t_prev;
      if (k > 0) t_prev = static_cast<double>(k - 1) * config.delta;
      PredictionOutcome pred = tracker.predict(x, t_k, t_prev);
      x = tracker.update(pred.x_pred, t_next);
      if (!all_finite(x)) throw NumericError("state is not finite at tick " + std::to_string(k + 1));
      traj.records.push_back(make_record(oracle, optimum, k + 1, t_next, x, std::move(pred), hint));
    }
  } catch (const NumericError& e) {
    throw NumericAbort(e.what(), std::move(traj));
  } catch (const NotSpdError& e) {
    throw NumericAbort(e.what(), std::move(traj));
  }
  return traj;
}

std::vector<double> error_series(const Trajectory& traj, ErrorMetric metric) {
  std::vector<double> out;
  out.reserve(traj.records.size());
  for (const StepRecord& r : traj.records) {
    const auto& v = metric == ErrorMetric::err_f ? r.err_f : r.err_x;
    if (!v) throw MissingOptimumError("record " + std::to_string(r.k) + " has no reference optimum");
    out.push_back(*v);
  }
  return out;
}

std::optional<std::size_t> first_index_below(std::span<const double> values, double threshold) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < threshold) return i;
  return std::nullopt;
}

std::optional<std::size_t> first_k_below(const Trajectory& traj, double threshold, ErrorMetric metric) {
  const std::vector<double> e = error_series(traj, metric);
  const auto i = first_index_below(e, threshold);
  if (!i) return std::nullopt;
  return traj.records[*i].k;
}

ErrorSummary tracking_error_summary(const Trajectory& traj, double tail_fraction, std::optional<double> threshold,
                                    ErrorMetric metric) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("tail_fraction must lie in (0, 1]");
  const std::vector<double> e = error_series(traj, metric);
  const auto tail = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(e.size())));
  if (tail == 0) throw std::invalid_argument("tail is empty for " + std::to_string(e.size()) + " records");

  ErrorSummary s;
  s.tail_count = tail;
  s.max_tail = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t i = e.size() - tail; i < e.size(); ++i) {
    s.max_tail = std::max(s.max_tail, e[i]);
    sum += e[i];
  }
  s.mean_tail = sum / static_cast<double>(tail);
  if (threshold) {
    if (const auto i = first_index_below(e, *threshold)) s.first_k_below = traj.records[*i].k;
  }
  return s;
}

}  // namespace tvopt
