#pragma once

// Small dense linear algebra: enough to factor, invert and diagonalise the
// m x m information matrices and n x n rate matrices this library works with.
// Everything is dense and row-major; n stays in the tens.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "dopt/error.hpp"

namespace dopt {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> diagonal() const;
  Matrix transposed() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double frobenius_norm(const Matrix& a);
double max_abs_entry(const Matrix& a);
/// max_ij |a_ij - b_ij|; the shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);
/// True when |a_ij - a_ji| <= rel_tol * max|a| for every pair.
bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Lower-triangular L with L L^T = A.  Throws NotPositiveDefinite when a pivot
/// falls to 1e-12 * max diagonal or below.
Matrix cholesky(const Matrix& a);

struct InverseLogdet {
  Matrix inverse;
  double logdet = 0.0;
};

/// Inverse and log-determinant of a symmetric positive definite matrix via
/// its Cholesky factor.
InverseLogdet inverse_and_logdet(const Matrix& a);

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

inline constexpr int kJacobiSweepBudget = 100;

/// Cyclic Jacobi eigendecomposition.  Throws NoConvergence if the sweep
/// budget runs out before the off-diagonal mass vanishes.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Eigenvalues of a general real square matrix (unsorted).
std::vector<std::complex<double>> general_eigenvalues(const Matrix& a);

}  // namespace dopt

namespace dopt {

/// Determinant of a symmetric matrix (row-major, n x n) by an unpivoted
/// LDL^T sweep in whatever precision Real offers.  Returns 0 when a pivot
/// vanishes; meant for well-conditioned positive definite inputs where the
/// extra precision, not pivoting, is the point.
template <class Real>
Real ldlt_determinant(std::vector<Real> a, std::size_t n) {
  Real det = 1;
  for (std::size_t j = 0; j < n; ++j) {
    const Real pivot = a[j * n + j];
    if (!(pivot > Real(0))) return Real(0);
    det *= pivot;
    for (std::size_t i = j + 1; i < n; ++i) {
      const Real f = a[i * n + j] / pivot;
      for (std::size_t k = j + 1; k <= i; ++k) a[i * n + k] -= f * a[k * n + j];
    }
  }
  return det;
}

}  // namespace dopt
