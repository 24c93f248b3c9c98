#include "tvopt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvopt {

namespace {

double gamma_of(const RegularityConstants& c, double delta, double eps) {
  return 2.0 * c.K1 / delta + c.M * c.K1 * c.K1 / (2.0 * eps * eps) + 0.5 * c.K3 + c.K1 * c.K2 / eps;
}

double mu13_of(const RegularityConstants& c, double delta) { return c.K1 + 0.5 * delta * c.K3; }

double mu4_of(const RegularityConstants& c, double delta, double eps) {
  return eps * c.m * c.K2 + c.K1 + 0.5 * delta * c.K3 + 1.5 * c.m * delta * c.K2 * c.K2;
}

}  // namespace

double psi(const RegularityConstants& c, double delta) {
  return delta * (c.K1 + 0.5 * delta * c.K3) +
         (c.K2 * c.K2 * delta * delta / (2.0 * c.m)) * (c.M * delta / c.m + 2.0);
}

BoundReport bound_report(const RegularityConstants& c, double alpha, double delta, double epsilon) {
  if (!(c.m > 0.0)) throw ConfigError("bound_report: m must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("bound_report: epsilon must be positive");
  if (!(delta > 0.0)) throw ConfigError("bound_report: delta must be positive");
  if (!(alpha > 0.0)) throw ConfigError("bound_report: alpha must be positive");
  c.validate();

  BoundReport r;
  r.inputs = {c, alpha, delta, epsilon};
  const double d = delta, e = epsilon, M = c.M, m = c.m;
  r.psi = psi(c, d);
  r.kappa = 1.0 - alpha * M / 2.0;
  r.rho = 1.0 - 2.0 * r.kappa * alpha * m;
  r.gamma = gamma_of(c, d, e);
  r.gamma_prime = c.K3 + 2.0 * c.K1 / d + c.K1 * c.K1 * M / (e * e) + c.K2 * (c.K1 + 0.5 * d * c.K3) / e +
                  d * d * c.K3 * c.K3 * M / (4.0 * e * e);
  r.mu_alg13 = mu13_of(c, d);
  r.mu_alg3_printed = c.K1 + 0.5 * d * d * c.K3;
  r.mu_alg4 = mu4_of(c, d, e);
  r.eta = 2.0 * c.K1 / d + 0.5 * c.K3 + 2.0 * c.K1 * c.K2 / e + M * c.K1 * c.K1 / (2.0 * e * e);

  const double a1 = 4.0 * r.kappa * r.kappa * alpha * alpha * m;
  const double a2 = a1 * m;
  const double base = r.psi / a1;
  r.E1 = base + std::max(r.gamma * d * d, r.mu_alg13 * d) / a2;
  r.E2 = base + std::max(r.gamma_prime * d * d, r.mu_alg13 * d) / a2;
  r.E3 = base + std::max({r.gamma * d * d, r.mu_alg13 * d, r.eta * d * d}) / a2;
  r.E3_printed = base + std::max({r.gamma * d * d, r.mu_alg3_printed * d, r.eta * d * d}) / a2;
  r.E4 = base + std::max(r.gamma * d * d, r.mu_alg4 * d) / a2;

  const double inf = std::numeric_limits<double>::infinity();
  const double lin = c.K1 * M + 2.0 * e * c.K2;
  r.delta_max_lemma2 = lin > 0.0 ? 2.0 * e * e / lin : inf;
  // Positive root of (K3 M / 2) d^2 + (K1 M + 2 eps K2) d - 2 eps^2 = 0.
  const double quad = 0.5 * c.K3 * M;
  if (quad > 0.0) {
    r.delta_max_remark3 = 4.0 * e * e / (lin + std::sqrt(lin * lin + 8.0 * quad * e * e));
  } else {
    r.delta_max_remark3 = r.delta_max_lemma2;
  }
  r.alpha_warning = alpha > 1.0 / (2.0 * M);
  return r;
}

std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::E1: return "E1";
    case BoundKind::E2: return "E2";
    case BoundKind::E3: return "E3";
    case BoundKind::E4: return "E4";
  }
  return "E1";
}

double neighborhood(const BoundReport& r, BoundKind k) {
  switch (k) {
    case BoundKind::E1: return r.E1;
    case BoundKind::E2: return r.E2;
    case BoundKind::E3: return r.E3;
    case BoundKind::E4: return r.E4;
  }
  return r.E1;
}

std::optional<BoundKind> bound_for(Algorithm a) {
  switch (a) {
    case Algorithm::alg1: return BoundKind::E1;
    case Algorithm::alg2: return BoundKind::E2;
    case Algorithm::alg3: return BoundKind::E3;
    case Algorithm::alg4:
    case Algorithm::alg4_approx: return BoundKind::E4;
    case Algorithm::gd:
    case Algorithm::euler2: return std::nullopt;
  }
  return std::nullopt;
}

double ultimate_bound(const BoundReport& report, BoundKind which) { return neighborhood(report, which); }

BoundCheck check_bound(const Trajectory& traj, const BoundReport& report, BoundKind which, double tolerance) {
  const std::vector<double> err = error_series(traj, ErrorMetric::err_f);
  BoundCheck out;
  out.neighborhood = neighborhood(report, which);
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (const StepRecord& r : traj.records)
    if (r.k > 0) ++out.branch_counts[std::string(to_string(r.branch))];
  if (err.empty()) return out;

  const double e0 = err[0];
  const double E = out.neighborhood;
  double rho_pow = 1.0;  // rho^(k-1)
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double rhs = rho_pow * e0 + (1.0 - rho_pow) * E;
    const double margin = rhs - err[k];
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_k = traj.records[k].k;
    }
    rho_pow *= report.rho;
  }
  out.holds = out.worst_margin >= -tolerance;
  return out;
}

std::string_view to_string(EpsilonStatus s) {
  switch (s) {
    case EpsilonStatus::found: return "found";
    case EpsilonStatus::degenerate: return "degenerate";
    case EpsilonStatus::no_root: return "no-root";
  }
  return "no-root";
}

EpsilonStar epsilon_star(const RegularityConstants& c, double, double delta, MuVariant variant) {
  c.validate();
  if (!(delta > 0.0)) throw ConfigError("epsilon_star: delta must be positive");
  EpsilonStar out;
  if (c.K1 == 0.0) {
    out.status = EpsilonStatus::degenerate;
    return out;
  }
  // h > 0 for small epsilon since gamma blows up like 1/eps^2.
  auto h = [&](double eps) {
    const double mu = variant == MuVariant::alg13 ? mu13_of(c, delta) : mu4_of(c, delta, eps);
    return gamma_of(c, delta, eps) * delta * delta - mu * delta;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) {
      out.status = EpsilonStatus::no_root;
      out.epsilon = hi;
      out.residual = h(hi);
      return out;
    }
  }
  double mid = hi;
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = h(mid);
    if (std::abs(v) <= 1e-12 || mid == lo || mid == hi) break;
    (v > 0.0 ? lo : hi) = mid;
  }
  out.status = EpsilonStatus::found;
  out.epsilon = mid;
  out.residual = h(mid);
  return out;
}

}  // namespace tvopt
