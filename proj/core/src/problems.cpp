#include "tvopt/problems.hpp"

#include <cmath>
#include <random>

namespace tvopt {

namespace {

double scalar(VectorView x) {
  if (x.size() != 1) throw DimensionError("scalar-tracking: expected dimension 1");
  return x[0];
}

void require_dim(VectorView x, std::size_t n, const char* who) {
  if (x.size() != n)
    throw DimensionError(std::string(who) + ": expected dimension " + std::to_string(n) + ", got " +
                         std::to_string(x.size()));
}

}  // namespace

// ---------------------------------------------------------------------------
// scalar-tracking

double ScalarTrackingCost::value(VectorView xv, double t) const {
  const double x = scalar(xv);
  const double r = x - 2.0 * std::sin(t);
  return 0.5 * r * r + std::cos(3.0 * t) * x;
}

Vector ScalarTrackingCost::grad_x(VectorView xv, double t) const {
  const double x = scalar(xv);
  return {x - 2.0 * std::sin(t) + std::cos(3.0 * t)};
}

double ScalarTrackingCost::grad_t(VectorView xv, double t) const {
  const double x = scalar(xv);
  return -2.0 * std::cos(t) * (x - 2.0 * std::sin(t)) - 3.0 * std::sin(3.0 * t) * x;
}

Vector ScalarTrackingCost::grad_xt(VectorView xv, double t) const {
  scalar(xv);
  return {-2.0 * std::cos(t) - 3.0 * std::sin(3.0 * t)};
}

SymMatrix ScalarTrackingCost::hess_xx(VectorView xv, double) const {
  scalar(xv);
  return SymMatrix::identity(1);
}

double ScalarTrackingCost::grad_tt(VectorView xv, double t) const {
  const double x = scalar(xv);
  const double c = std::cos(t);
  return 2.0 * std::sin(t) * (x - 2.0 * std::sin(t)) + 4.0 * c * c - 9.0 * std::cos(3.0 * t) * x;
}

double ScalarTrackingCost::minimizer(double t) { return 2.0 * std::sin(t) - std::cos(3.0 * t); }

double ScalarTrackingCost::min_value(double t) {
  const double c = std::cos(3.0 * t);
  return 2.0 * std::sin(t) * c - 0.5 * c * c;
}

// ---------------------------------------------------------------------------
// quadratic-tracker

SeparableQuadraticTracker::SeparableQuadraticTracker(std::size_t n, double amplitude, double omega)
    : n_(n), amplitude_(amplitude), omega_(omega) {
  if (n == 0) throw ConfigError("quadratic-tracker: n must be at least 1");
}

double SeparableQuadraticTracker::target(double t) const { return amplitude_ * std::sin(omega_ * t); }

double SeparableQuadraticTracker::value(VectorView x, double t) const {
  require_dim(x, n_, "quadratic-tracker");
  const double b = target(t);
  double s = 0.0;
  for (double xi : x) s += (xi - b) * (xi - b);
  return 0.5 * s;
}

Vector SeparableQuadraticTracker::grad_x(VectorView x, double t) const {
  require_dim(x, n_, "quadratic-tracker");
  const double b = target(t);
  Vector g(n_);
  for (std::size_t i = 0; i < n_; ++i) g[i] = x[i] - b;
  return g;
}

double SeparableQuadraticTracker::grad_t(VectorView x, double t) const {
  require_dim(x, n_, "quadratic-tracker");
  const double b = target(t);
  const double bdot = amplitude_ * omega_ * std::cos(omega_ * t);
  double s = 0.0;
  for (double xi : x) s += xi - b;
  return -bdot * s;
}

Vector SeparableQuadraticTracker::grad_xt(VectorView x, double t) const {
  require_dim(x, n_, "quadratic-tracker");
  return Vector(n_, -amplitude_ * omega_ * std::cos(omega_ * t));
}

SymMatrix SeparableQuadraticTracker::hess_xx(VectorView x, double) const {
  require_dim(x, n_, "quadratic-tracker");
  return SymMatrix::identity(n_);
}

double SeparableQuadraticTracker::grad_tt(VectorView x, double t) const {
  require_dim(x, n_, "quadratic-tracker");
  const double b = target(t);
  const double bdot = amplitude_ * omega_ * std::cos(omega_ * t);
  const double bddot = -amplitude_ * omega_ * omega_ * std::sin(omega_ * t);
  double s = 0.0;
  for (double xi : x) s += xi - b;
  return static_cast<double>(n_) * bdot * bdot - bddot * s;
}

// ---------------------------------------------------------------------------
// quadratic-drift

QuadraticDriftCost::QuadraticDriftCost(SymMatrix a, Vector b0, Vector b1)
    : a_(std::move(a)), chol_(a_), b0_(std::move(b0)), b1_(std::move(b1)), curvature_{0.0, 0.0} {
  if (b0_.size() != a_.size() || b1_.size() != a_.size())
    throw DimensionError("quadratic-drift: b0, b1 must match the dimension of A");
  const EigenRange r = eigen_range(a_);
  curvature_ = {r.min, r.max};
  b1_is_zero_ = squared_norm(b1_) == 0.0;
}

Vector QuadraticDriftCost::linear_term(double t) const { return axpy(t, b1_, b0_); }

double QuadraticDriftCost::value(VectorView x, double t) const {
  require_dim(x, a_.size(), "quadratic-drift");
  const Vector ax = a_.multiply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * (0.5 * ax[i] + b0_[i] + t * b1_[i]);
  return s;
}

Vector QuadraticDriftCost::grad_x(VectorView x, double t) const {
  require_dim(x, a_.size(), "quadratic-drift");
  Vector g = a_.multiply(x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += b0_[i] + t * b1_[i];
  return g;
}

double QuadraticDriftCost::grad_t(VectorView x, double) const {
  require_dim(x, a_.size(), "quadratic-drift");
  return dot(b1_, x);
}

Vector QuadraticDriftCost::grad_xt(VectorView x, double) const {
  require_dim(x, a_.size(), "quadratic-drift");
  return b1_;
}

SymMatrix QuadraticDriftCost::hess_xx(VectorView x, double) const {
  require_dim(x, a_.size(), "quadratic-drift");
  return a_;
}

double QuadraticDriftCost::grad_tt(VectorView x, double) const {
  require_dim(x, a_.size(), "quadratic-drift");
  return 0.0;
}

OptimumPoint QuadraticDriftCost::optimum(double t) const {
  const Vector b = linear_term(t);
  Vector x = chol_.solve(b);
  for (double& v : x) v = -v;
  // f* = 0.5 b^T x* at the minimizer
  return {x, 0.5 * dot(b, x)};
}

QuadraticDriftCost random_quadratic_drift(std::size_t n, std::uint64_t seed, double shift, double drift) {
  if (n == 0) throw ConfigError("quadratic-drift: n must be at least 1");
  if (!(shift > 0.0)) throw ConfigError("quadratic-drift: shift must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> g(n * n);
  for (double& v : g) v = normal(rng);
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += g[k * n + i] * g[k * n + j];
      a.at(i, j) = s / static_cast<double>(n) + (i == j ? shift : 0.0);
    }
  Vector b0(n), b1(n);
  for (double& v : b0) v = normal(rng);
  for (double& v : b1) v = drift * normal(rng);
  return QuadraticDriftCost(std::move(a), std::move(b0), std::move(b1));
}

// ---------------------------------------------------------------------------

AnalyticOptimum::AnalyticOptimum(std::shared_ptr<const CostOracle> cost) : cost_(std::move(cost)) {
  if (!dynamic_cast<const ScalarTrackingCost*>(cost_.get()) &&
      !dynamic_cast<const SeparableQuadraticTracker*>(cost_.get()) &&
      !dynamic_cast<const QuadraticDriftCost*>(cost_.get())) {
    throw ConfigError("AnalyticOptimum: no closed form for " + cost_->name());
  }
}

OptimumPoint AnalyticOptimum::at(double t, VectorView) const {
  if (dynamic_cast<const ScalarTrackingCost*>(cost_.get()))
    return {{ScalarTrackingCost::minimizer(t)}, ScalarTrackingCost::min_value(t)};
  if (const auto* q = dynamic_cast<const SeparableQuadraticTracker*>(cost_.get()))
    return {Vector(q->dimension(), q->target(t)), 0.0};
  return static_cast<const QuadraticDriftCost*>(cost_.get())->optimum(t);
}

namespace {

double param(const ParamMap& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::size_t size_param(const ParamMap& p, const std::string& key, double fallback) {
  const double v = param(p, key, fallback);
  if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(key + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

Problem make_problem(const ProblemSpec& spec) {
  std::shared_ptr<const CostOracle> cost;
  const ParamMap& p = spec.params;
  if (spec.id == "scalar-tracking") {
    cost = std::make_shared<ScalarTrackingCost>();
  } else if (spec.id == "quadratic-tracker") {
    cost = std::make_shared<SeparableQuadraticTracker>(size_param(p, "n", 10), param(p, "amplitude", 1.0),
                                                       param(p, "omega", 1.0));
  } else if (spec.id == "quadratic-drift") {
    cost = std::make_shared<QuadraticDriftCost>(random_quadratic_drift(
        size_param(p, "n", 5), static_cast<std::uint64_t>(param(p, "seed", 1)), param(p, "shift", 1.0),
        param(p, "drift", 1.0)));
  } else if (spec.id == "time-invariant-quadratic") {
    cost = std::make_shared<QuadraticDriftCost>(random_quadratic_drift(
        size_param(p, "n", 5), static_cast<std::uint64_t>(param(p, "seed", 1)), param(p, "shift", 1.0), 0.0));
  } else {
    throw ConfigError("unknown problem id '" + spec.id + "'");
  }
  auto optimum = std::make_shared<AnalyticOptimum>(cost);
  return {std::move(cost), std::move(optimum)};
}

}  // namespace tvopt
