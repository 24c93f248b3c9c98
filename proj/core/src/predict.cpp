#include "tvopt/predict.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tvopt {

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::identity: return "identity";
    case Branch::first_order_grad_t: return "first-order-grad-t";
    case Branch::first_order_xt: return "first-order-xt";
    case Branch::second_order: return "second-order";
  }
  return "identity";
}

Branch parse_branch(std::string_view s) {
  for (Branch b : {Branch::identity, Branch::first_order_grad_t, Branch::first_order_xt, Branch::second_order})
    if (to_string(b) == s) return b;
  throw std::invalid_argument("unknown branch '" + std::string(s) + "'");
}

namespace {

void check_params(double delta, double epsilon) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("predict: delta must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("predict: epsilon must be positive");
}

void check_vec(VectorView x, VectorView v, const char* what) {
  if (v.size() != x.size()) throw DimensionError(std::string("predict: ") + what + " length mismatch");
  if (!all_finite(v)) throw NumericError(std::string("predict: ") + what + " is not finite");
}

void check_scalar(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("predict: ") + what + " is not finite");
}

PredictionOutcome stay(VectorView x) { return {Vector(x.begin(), x.end()), Branch::identity, 0.0}; }

// x - (num / ||dir||^2) dir. Shared by every first-order branch so that
// equal inputs give bit-equal outputs.
PredictionOutcome gradient_step(VectorView x, VectorView dir, double dir_sq, double num, Branch b) {
  const double c = num / dir_sq;
  PredictionOutcome out{axpy(-c, dir, x), b, 0.0};
  out.step_norm = std::abs(c) * std::sqrt(dir_sq);
  return out;
}

PredictionOutcome newton_step(VectorView x, VectorView grad_xt, const SymMatrix& hess, double delta) {
  if (hess.size() != x.size()) throw DimensionError("predict: Hessian size mismatch");
  if (!hess.all_finite()) throw NumericError("predict: Hessian is not finite");
  const Vector z = spd_solve(hess, grad_xt);
  PredictionOutcome out{axpy(-delta, z, x), Branch::second_order, 0.0};
  out.step_norm = delta * norm2(z);
  return out;
}

}  // namespace

PredictionOutcome predict_identity(VectorView x) {
  if (!all_finite(x)) throw NumericError("predict: x is not finite");
  return stay(x);
}

PredictionOutcome predict_alg1(VectorView x, VectorView grad_x, double grad_t, double delta, double epsilon) {
  check_params(delta, epsilon);
  check_vec(x, x, "x");
  check_vec(x, grad_x, "grad_x");
  check_scalar(grad_t, "grad_t");
  const double g2 = squared_norm(grad_x);
  if (std::sqrt(g2) >= epsilon) return gradient_step(x, grad_x, g2, delta * std::abs(grad_t), Branch::first_order_grad_t);
  return stay(x);
}

PredictionOutcome predict_alg2(VectorView x, VectorView grad_x, double f_now, double f_prev, double delta,
                               double epsilon) {
  check_params(delta, epsilon);
  check_vec(x, x, "x");
  check_vec(x, grad_x, "grad_x");
  check_scalar(f_now, "f_now");
  check_scalar(f_prev, "f_prev");
  const double g2 = squared_norm(grad_x);
  if (std::sqrt(g2) >= epsilon) return gradient_step(x, grad_x, g2, std::abs(f_now - f_prev), Branch::first_order_grad_t);
  return stay(x);
}

PredictionOutcome predict_alg3(VectorView x, VectorView grad_x, double grad_t, VectorView grad_xt, double delta,
                               double epsilon) {
  check_params(delta, epsilon);
  check_vec(x, x, "x");
  check_vec(x, grad_x, "grad_x");
  check_vec(x, grad_xt, "grad_xt");
  check_scalar(grad_t, "grad_t");
  const Vector gp = axpy(delta, grad_xt, grad_x);
  const double gp2 = squared_norm(gp);
  if (std::sqrt(gp2) >= epsilon && dot(grad_xt, grad_x) <= 0.0)
    return gradient_step(x, gp, gp2, delta * std::abs(grad_t), Branch::first_order_xt);
  return predict_alg1(x, grad_x, grad_t, delta, epsilon);
}

PredictionOutcome predict_alg4(VectorView x, VectorView grad_x, double grad_t, VectorView grad_xt,
                               const SymMatrix& hess, double delta, double epsilon) {
  check_params(delta, epsilon);
  check_vec(x, x, "x");
  check_vec(x, grad_x, "grad_x");
  check_vec(x, grad_xt, "grad_xt");
  check_scalar(grad_t, "grad_t");
  if (norm2(grad_x) >= epsilon) return predict_alg1(x, grad_x, grad_t, delta, epsilon);
  return newton_step(x, grad_xt, hess, delta);
}

PredictionOutcome predict_euler_second_order(VectorView x, VectorView grad_xt, const SymMatrix& hess,
                                             double delta) {
  check_params(delta, 1.0);
  check_vec(x, x, "x");
  check_vec(x, grad_xt, "grad_xt");
  return newton_step(x, grad_xt, hess, delta);
}

}  // namespace tvopt
