#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvopt/errors.hpp"

namespace tvopt {

using Vector = std::vector<double>;
using VectorView = std::span<const double>;

// Vector primitives. All are O(n) and throw DimensionError on length mismatch.
double dot(VectorView a, VectorView b);
double norm2(VectorView a);
double squared_norm(VectorView a);
/// Returns a*x + y.
Vector axpy(double a, VectorView x, VectorView y);
/// y += a*x in place.
void axpy_inplace(double a, VectorView x, std::span<double> y);
Vector scaled(double a, VectorView x);
Vector subtract(VectorView a, VectorView b);
bool all_finite(VectorView a);

/// Symmetric matrix stored as its packed lower triangle, row by row.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t n);

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(VectorView d);
  /// Builds from a row-major dense n x n array, reading the lower triangle.
  static SymMatrix from_dense(std::size_t n, VectorView row_major);

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return i >= j ? packed_[index(i, j)] : packed_[index(j, i)];
  }
  double& at(std::size_t i, std::size_t j) noexcept {
    return i >= j ? packed_[index(i, j)] : packed_[index(j, i)];
  }

  Vector multiply(VectorView x) const;
  double frobenius_norm() const;
  bool all_finite() const;
  std::span<const double> packed() const noexcept { return packed_; }

 private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept { return i * (i + 1) / 2 + j; }

  std::size_t n_;
  std::vector<double> packed_;
};

/// Lower Cholesky factor A = L L^T, no pivoting. Construction throws
/// NotSpdError on the first non-positive pivot.
class Cholesky {
 public:
  explicit Cholesky(const SymMatrix& a);

  std::size_t size() const noexcept { return n_; }
  Vector solve(VectorView b) const;

 private:
  const double* row(std::size_t i) const noexcept { return l_.data() + i * (i + 1) / 2; }

  std::size_t n_;
  std::vector<double> l_;  // packed lower triangle of L
};

/// Solves A z = b for symmetric positive definite A.
Vector spd_solve(const SymMatrix& a, VectorView b);

/// All eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
/// Intended for the small matrices met when estimating m and M.
Vector symmetric_eigenvalues(const SymMatrix& a);

struct EigenRange {
  double min;
  double max;
};
EigenRange eigen_range(const SymMatrix& a);

}  // namespace tvopt
