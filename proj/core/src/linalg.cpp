#include "tvopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tvopt {

namespace {

void require_same_size(VectorView a, VectorView b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace

double dot(VectorView a, VectorView b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(VectorView a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm2(VectorView a) { return std::sqrt(squared_norm(a)); }

Vector axpy(double a, VectorView x, VectorView y) {
  require_same_size(x, y, "axpy");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
  return out;
}

void axpy_inplace(double a, VectorView x, std::span<double> y) {
  require_same_size(x, VectorView(y.data(), y.size()), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector scaled(double a, VectorView x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

Vector subtract(VectorView a, VectorView b) {
  require_same_size(a, b, "subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

bool all_finite(VectorView a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

SymMatrix::SymMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {
  if (n == 0) throw DimensionError("SymMatrix: dimension must be at least 1");
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(VectorView d) {
  SymMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

SymMatrix SymMatrix::from_dense(std::size_t n, VectorView row_major) {
  if (row_major.size() != n * n) throw DimensionError("SymMatrix::from_dense: expected n*n entries");
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m.at(i, j) = row_major[i * n + j];
  return m;
}

Vector SymMatrix::multiply(VectorView x) const {
  if (x.size() != n_) throw DimensionError("SymMatrix::multiply: length mismatch");
  Vector y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = packed_.data() + index(i, 0);
    double s = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      s += row[j] * x[j];
      y[j] += row[j] * x[i];
    }
    y[i] += s + row[i] * x[i];
  }
  return y;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (*this)(i, j);
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  return std::sqrt(s);
}

bool SymMatrix::all_finite() const { return tvopt::all_finite(packed_); }

Cholesky::Cholesky(const SymMatrix& a)
    : n_(a.size()), l_(a.packed().begin(), a.packed().end()) {
  for (std::size_t i = 0; i < n_; ++i) {
    double* li = l_.data() + i * (i + 1) / 2;
    for (std::size_t j = 0; j < i; ++j) {
      const double* lj = row(j);
      double s = li[j];
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / lj[j];
    }
    double d = li[i];
    for (std::size_t k = 0; k < i; ++k) d -= li[k] * li[k];
    if (!(d > 0.0)) {
      throw NotSpdError("Cholesky: non-positive pivot " + std::to_string(d) + " at row " +
                            std::to_string(i),
                        i);
    }
    li[i] = std::sqrt(d);
  }
}

Vector Cholesky::solve(VectorView b) const {
  if (b.size() != n_) throw DimensionError("Cholesky::solve: length mismatch");
  Vector y(b.begin(), b.end());
  // forward: L y = b
  for (std::size_t i = 0; i < n_; ++i) {
    const double* li = row(i);
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * y[k];
    y[i] = s / li[i];
  }
  // backward: L^T z = y, column-oriented so L is read by rows
  for (std::size_t i = n_; i-- > 0;) {
    const double* li = row(i);
    y[i] /= li[i];
    for (std::size_t k = 0; k < i; ++k) y[k] -= li[k] * y[i];
  }
  return y;
}

Vector spd_solve(const SymMatrix& a, VectorView b) {
  if (b.size() != a.size()) throw DimensionError("spd_solve: length mismatch");
  return Cholesky(a).solve(b);
}

Vector symmetric_eigenvalues(const SymMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

EigenRange eigen_range(const SymMatrix& a) {
  const Vector eig = symmetric_eigenvalues(a);
  return {eig.front(), eig.back()};
}

}  // namespace tvopt
