#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tvopt/costs.hpp"
#include "tvopt/engine.hpp"

namespace tvopt {

/// Bound on |f*(t_{k+1}) - f*(t_k)| over one sampling interval:
/// delta (K1 + delta K3 / 2) + (K2^2 delta^2 / 2m)(M delta / m + 2).
double psi(const RegularityConstants& c, double delta);

struct BoundInputs {
  RegularityConstants constants;
  double alpha = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
};

struct BoundReport {
  BoundInputs inputs;
  double psi = 0.0;
  double kappa = 0.0;
  /// Contraction factor 1 - 2 kappa alpha m of the error recursion.
  double rho = 0.0;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  /// K1 + delta K3 / 2, shared by the Alg1, Alg2 and Alg3 bounds.
  double mu_alg13 = 0.0;
  /// K1 + delta^2 K3 / 2, the Alg3 statement as printed.
  double mu_alg3_printed = 0.0;
  double mu_alg4 = 0.0;
  double eta = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  double E3 = 0.0;
  /// E3 evaluated with mu_alg3_printed.
  double E3_printed = 0.0;
  double E4 = 0.0;
  double delta_max_lemma2 = 0.0;
  double delta_max_remark3 = 0.0;
  /// Set when alpha > 1/(2M); the neighborhoods are then not guaranteed.
  bool alpha_warning = false;
};

/// Throws ConfigError unless m > 0, epsilon > 0, delta > 0 and alpha > 0.
BoundReport bound_report(const RegularityConstants& c, double alpha, double delta, double epsilon);

enum class BoundKind { E1, E2, E3, E4 };

std::string_view to_string(BoundKind k);
double neighborhood(const BoundReport& r, BoundKind k);
/// The neighborhood that applies to an algorithm; none for gd and euler2.
std::optional<BoundKind> bound_for(Algorithm a);

struct BoundCheck {
  bool holds = true;
  /// min over k >= 1 of RHS(k) - err(k); +inf for a single-record trajectory.
  double worst_margin = 0.0;
  std::size_t worst_k = 0;
  double neighborhood = 0.0;
  /// Ticks per prediction branch, a diagnostic only.
  std::map<std::string, std::size_t> branch_counts;
};

/// Compares err_f(k) for k >= 1 with rho^(k-1) err_f(0) + (1 - rho^(k-1)) E.
/// `tolerance` absorbs rounding in err_f. Throws MissingOptimumError if any
/// record lacks f_star.
BoundCheck check_bound(const Trajectory& traj, const BoundReport& report, BoundKind which,
                       double tolerance = 1e-9);

/// Limit of the recursion RHS, i.e. the neighborhood E itself.
double ultimate_bound(const BoundReport& report, BoundKind which);

/// Which mu enters gamma delta^2 = mu delta when solving for epsilon.
enum class MuVariant { alg13, alg4 };

enum class EpsilonStatus { found, degenerate, no_root };

std::string_view to_string(EpsilonStatus s);

struct EpsilonStar {
  EpsilonStatus status = EpsilonStatus::no_root;
  double epsilon = 0.0;
  double residual = 0.0;
};

/// Root of gamma(eps) delta^2 = mu(eps) delta by bisection. `degenerate` when
/// K1 = 0 (any epsilon works), `no_root` when no sign change is found for
/// epsilon up to 1e12.
EpsilonStar epsilon_star(const RegularityConstants& c, double alpha, double delta,
                         MuVariant variant = MuVariant::alg13);

}  // namespace tvopt
