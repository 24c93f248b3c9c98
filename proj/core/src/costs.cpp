#include "tvopt/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tvopt {

void EvalPoint::validate() const {
  if (!all_finite(x) || !std::isfinite(t)) throw NumericError("EvalPoint: non-finite component");
  if (t < 0.0) throw NumericError("EvalPoint: time must be non-negative, got " + std::to_string(t));
}

bool CapabilitySet::covers(const CapabilitySet& need) const noexcept {
  return (has_exact_grad_t || !need.has_exact_grad_t) &&
         (has_exact_grad_xt || !need.has_exact_grad_xt) &&
         (has_exact_hessian || !need.has_exact_hessian) &&
         (has_exact_grad_tt || !need.has_exact_grad_tt);
}

void RegularityConstants::validate() const {
  if (!(m > 0.0)) throw ConfigError("RegularityConstants: m must be positive");
  if (!(M >= m)) throw ConfigError("RegularityConstants: M must be at least m");
  if (!(K1 >= 0.0) || !(K2 >= 0.0) || !(K3 >= 0.0))
    throw ConfigError("RegularityConstants: K1, K2, K3 must be non-negative");
}

std::string_view to_string(ConstantsProvenance p) {
  return p == ConstantsProvenance::declared ? "declared" : "empirical-over-trajectory";
}

double CostOracle::grad_t(VectorView, double) const {
  throw CapabilityError(name() + ": exact grad_t not available");
}
Vector CostOracle::grad_xt(VectorView, double) const {
  throw CapabilityError(name() + ": exact grad_xt not available");
}
SymMatrix CostOracle::hess_xx(VectorView, double) const {
  throw CapabilityError(name() + ": exact Hessian not available");
}
double CostOracle::grad_tt(VectorView, double) const {
  throw CapabilityError(name() + ": exact grad_tt not available");
}

namespace {

// Step pair (t - h_lo, t + h_hi) that stays in t >= 0.
struct TimeStencil {
  double lo;
  double hi;
};

TimeStencil time_stencil(double t, double h) {
  if (t >= h) return {t - h, t + h};
  return {t, t + 2.0 * h};
}

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericError(what + " is not finite");
}

void require_finite(VectorView v, const std::string& what) {
  if (!all_finite(v)) throw NumericError(what + " is not finite");
}

}  // namespace

double central_grad_t(const CostOracle& oracle, VectorView x, double t, double h) {
  const auto s = time_stencil(t, h);
  return (oracle.value(x, s.hi) - oracle.value(x, s.lo)) / (s.hi - s.lo);
}

Vector central_grad_xt(const CostOracle& oracle, VectorView x, double t, double h) {
  const auto s = time_stencil(t, h);
  Vector hi = oracle.grad_x(x, s.hi);
  const Vector lo = oracle.grad_x(x, s.lo);
  const double inv = 1.0 / (s.hi - s.lo);
  for (std::size_t i = 0; i < hi.size(); ++i) hi[i] = (hi[i] - lo[i]) * inv;
  return hi;
}

Vector central_grad_x(const CostOracle& oracle, VectorView x, double t, double h) {
  Vector g(x.size());
  Vector probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double fp = oracle.value(probe, t);
    probe[i] = x[i] - step;
    const double fm = oracle.value(probe, t);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

SymMatrix central_hessian(const CostOracle& oracle, VectorView x, double t, double h) {
  const std::size_t n = x.size();
  std::vector<Vector> cols(n);
  Vector probe(x.begin(), x.end());
  for (std::size_t j = 0; j < n; ++j) {
    const double step = h * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + step;
    Vector gp = oracle.grad_x(probe, t);
    probe[j] = x[j] - step;
    const Vector gm = oracle.grad_x(probe, t);
    probe[j] = x[j];
    for (std::size_t i = 0; i < n; ++i) gp[i] = (gp[i] - gm[i]) / (2.0 * step);
    cols[j] = std::move(gp);
  }
  SymMatrix hess(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) hess.at(i, j) = 0.5 * (cols[j][i] + cols[i][j]);
  return hess;
}

double central_grad_tt(const CostOracle& oracle, VectorView x, double t, double h) {
  const double c = std::max(t, h);
  return (oracle.value(x, c + h) - 2.0 * oracle.value(x, c) + oracle.value(x, c - h)) / (h * h);
}

CostEvaluation eval(const CostOracle& oracle, const EvalPoint& p, const EvalRequest& want) {
  if (p.x.size() != oracle.dimension()) {
    throw DimensionError(oracle.name() + ": expected dimension " + std::to_string(oracle.dimension()) +
                         ", got " + std::to_string(p.x.size()));
  }
  p.validate();
  const CapabilitySet caps = oracle.capabilities();
  const bool fd = want.fallback == Fallback::finite_difference;

  CostEvaluation out;
  out.value = oracle.value(p.x, p.t);
  require_finite(out.value, oracle.name() + " value");
  out.grad_x = oracle.grad_x(p.x, p.t);
  if (out.grad_x.size() != p.x.size()) throw DimensionError(oracle.name() + ": gradient length mismatch");
  require_finite(out.grad_x, oracle.name() + " grad_x");

  if (want.grad_t) {
    if (caps.has_exact_grad_t) {
      out.grad_t = oracle.grad_t(p.x, p.t);
    } else if (fd) {
      out.grad_t = central_grad_t(oracle, p.x, p.t);
    }
    if (out.grad_t) require_finite(*out.grad_t, oracle.name() + " grad_t");
  }
  if (want.grad_xt) {
    if (caps.has_exact_grad_xt) {
      out.grad_xt = oracle.grad_xt(p.x, p.t);
    } else if (fd) {
      out.grad_xt = central_grad_xt(oracle, p.x, p.t);
    }
    if (out.grad_xt) require_finite(*out.grad_xt, oracle.name() + " grad_xt");
  }
  if (want.hessian) {
    if (caps.has_exact_hessian) {
      out.hess_xx = oracle.hess_xx(p.x, p.t);
    } else if (fd) {
      out.hess_xx = central_hessian(oracle, p.x, p.t);
    }
    if (out.hess_xx && !out.hess_xx->all_finite())
      throw NumericError(oracle.name() + " Hessian is not finite");
  }
  return out;
}

double fd_grad_t(const CostOracle& oracle, VectorView x, double t_k, double t_km1) {
  if (!(t_k > t_km1)) throw std::invalid_argument("fd_grad_t: requires t_k > t_km1");
  return (oracle.value(x, t_k) - oracle.value(x, t_km1)) / (t_k - t_km1);
}

Vector fd_grad_xt(const CostOracle& oracle, VectorView x, double t_k, double t_km1) {
  if (!(t_k > t_km1)) throw std::invalid_argument("fd_grad_xt: requires t_k > t_km1");
  Vector now = oracle.grad_x(x, t_k);
  const Vector prev = oracle.grad_x(x, t_km1);
  const double inv = 1.0 / (t_k - t_km1);
  for (std::size_t i = 0; i < now.size(); ++i) now[i] = (now[i] - prev[i]) * inv;
  return now;
}

RegularityConstants estimate_constants(const CostOracle& oracle, std::span<const EvalPoint> points,
                                       const EstimateOptions& options) {
  if (points.empty()) throw std::invalid_argument("estimate_constants: no points");
  const CapabilitySet caps = oracle.capabilities();
  const bool fd = options.allow_finite_difference;
  const auto declared = oracle.declared_curvature();

  if (!declared && !caps.has_exact_hessian && !fd)
    throw CapabilityError(oracle.name() + ": need a Hessian or declared curvature to estimate m, M");
  if (!caps.has_exact_grad_t && !fd)
    throw CapabilityError(oracle.name() + ": need grad_t to estimate K1");
  if (!caps.has_exact_grad_xt && !fd)
    throw CapabilityError(oracle.name() + ": need grad_xt to estimate K2");
  if (!caps.has_exact_grad_tt && !fd)
    throw CapabilityError(oracle.name() + ": need grad_tt to estimate K3");

  RegularityConstants c;
  c.provenance = ConstantsProvenance::empirical;
  c.m = std::numeric_limits<double>::infinity();
  c.M = 0.0;
  if (declared) {
    c.m = declared->m;
    c.M = declared->M;
  }

  for (const EvalPoint& p : points) {
    p.validate();
    if (!declared) {
      const SymMatrix h = caps.has_exact_hessian ? oracle.hess_xx(p.x, p.t) : central_hessian(oracle, p.x, p.t);
      const EigenRange r = eigen_range(h);
      c.m = std::min(c.m, r.min);
      c.M = std::max(c.M, r.max);
    }
    const double gt = caps.has_exact_grad_t ? oracle.grad_t(p.x, p.t) : central_grad_t(oracle, p.x, p.t);
    const Vector gxt = caps.has_exact_grad_xt ? oracle.grad_xt(p.x, p.t) : central_grad_xt(oracle, p.x, p.t);
    const double gtt = caps.has_exact_grad_tt ? oracle.grad_tt(p.x, p.t) : central_grad_tt(oracle, p.x, p.t);
    c.K1 = std::max(c.K1, std::abs(gt));
    c.K2 = std::max(c.K2, norm2(gxt));
    c.K3 = std::max(c.K3, std::abs(gtt));
  }
  if (!std::isfinite(c.K1) || !std::isfinite(c.K2) || !std::isfinite(c.K3))
    throw NumericError(oracle.name() + ": non-finite derivative bound");

  const double scale = 1.0 + options.margin;
  c.K1 *= scale;
  c.K2 *= scale;
  c.K3 *= scale;
  c.M *= scale;
  c.m /= scale;
  if (!(c.m > 0.0))
    throw NumericError(oracle.name() + ": Hessian is not positive definite along the points");
  return c;
}

InnerSolverOptimum::InnerSolverOptimum(const CostOracle& oracle, double tolerance, int max_iterations)
    : oracle_(oracle), tolerance_(tolerance), max_iterations_(max_iterations) {}

OptimumPoint InnerSolverOptimum::at(double t, VectorView warm_start) const {
  Vector x = warm_start.size() == oracle_.dimension() ? Vector(warm_start.begin(), warm_start.end())
                                                       : Vector(oracle_.dimension(), 0.0);
  double fx = oracle_.value(x, t);
  double step = 1.0;
  if (const auto curv = oracle_.declared_curvature()) step = 1.0 / curv->M;

  for (int it = 0; it < max_iterations_; ++it) {
    const Vector g = oracle_.grad_x(x, t);
    const double g2 = squared_norm(g);
    if (std::sqrt(g2) <= tolerance_) break;
    // Armijo backtracking, then let the step grow back a little.
    double s = step;
    Vector trial;
    double ft = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      trial = axpy(-s, g, x);
      ft = oracle_.value(trial, t);
      if (ft <= fx - 0.5 * s * g2) break;
      s *= 0.5;
    }
    if (!(ft <= fx)) break;  // no further progress at double precision
    x = std::move(trial);
    fx = ft;
    step = s * 1.5;
  }
  if (!all_finite(x) || !std::isfinite(fx)) throw NumericError("InnerSolverOptimum: diverged");
  return {std::move(x), fx};
}

}  // namespace tvopt
