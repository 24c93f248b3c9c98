#pragma once

#include <concepts>
#include <string_view>

#include "tvopt/linalg.hpp"

namespace tvopt {

enum class Branch { identity, first_order_grad_t, first_order_xt, second_order };

std::string_view to_string(Branch b);
/// Accepts the names produced by to_string; throws std::invalid_argument otherwise.
Branch parse_branch(std::string_view s);

struct PredictionOutcome {
  Vector x_pred;
  Branch branch = Branch::identity;
  double step_norm = 0.0;
};

// Every predictor throws NumericError on non-finite input, std::invalid_argument
// on delta <= 0 or epsilon <= 0, and DimensionError on mismatched lengths.

PredictionOutcome predict_identity(VectorView x);

/// Steps along -grad_x with length delta |grad_t| / ||grad_x|| when
/// ||grad_x|| >= epsilon, otherwise returns x.
PredictionOutcome predict_alg1(VectorView x, VectorView grad_x, double grad_t, double delta, double epsilon);

/// Alg1 with delta |grad_t| replaced by |f_now - f_prev|.
PredictionOutcome predict_alg2(VectorView x, VectorView grad_x, double f_now, double f_prev, double delta,
                               double epsilon);

/// Uses g' = grad_x + delta grad_xt when ||g'|| >= epsilon and
/// grad_xt . grad_x <= 0, falls back to alg1 otherwise.
PredictionOutcome predict_alg3(VectorView x, VectorView grad_x, double grad_t, VectorView grad_xt, double delta,
                               double epsilon);

/// Alg1 when ||grad_x|| >= epsilon, otherwise x - delta hess^{-1} grad_xt.
/// NotSpdError if the solve fails.
PredictionOutcome predict_alg4(VectorView x, VectorView grad_x, double grad_t, VectorView grad_xt,
                               const SymMatrix& hess, double delta, double epsilon);

/// Same, with the Hessian built only when the second-order branch is taken.
template <std::invocable HessianFn>
PredictionOutcome predict_alg4(VectorView x, VectorView grad_x, double grad_t, VectorView grad_xt,
                               HessianFn&& hessian, double delta, double epsilon) {
  if (norm2(grad_x) >= epsilon) return predict_alg1(x, grad_x, grad_t, delta, epsilon);
  return predict_alg4(x, grad_x, grad_t, grad_xt, static_cast<const SymMatrix&>(hessian()), delta, epsilon);
}

/// x - delta hess^{-1} grad_xt, unconditionally.
PredictionOutcome predict_euler_second_order(VectorView x, VectorView grad_xt, const SymMatrix& hess,
                                             double delta);

}  // namespace tvopt
