#include "dopt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace dopt {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidDesign: return "InvalidDesign";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::SingularStart: return "SingularStart";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NoIntercept: return "NoIntercept";
    case ErrorCode::NotInteriorOptimum: return "NotInteriorOptimum";
    case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  if (rows_ == 0 || cols_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::ShapeError, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

std::vector<double> Matrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorCode::ShapeError, "matrix shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorCode::ShapeError, "matrix shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeError, "matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::ShapeError, "matrix-vector shape mismatch");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs_entry(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s = std::max(s, std::abs(v));
  return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::ShapeError, "matrix shapes differ");
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    s = std::max(s, std::abs(a.data()[k] - b.data()[k]));
  return s;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (!a.square()) return false;
  const double tol = rel_tol * max_abs_entry(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

void require_symmetric_input(const Matrix& a, double rel_tol, const char* what) {
  if (a.empty() || !a.square())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": matrix must be square");
  if (!a.all_finite())
    throw Error(ErrorCode::NonFinite, std::string(what) + ": non-finite entry");
  if (!is_symmetric(a, rel_tol))
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": matrix is not symmetric");
}

}  // namespace

Matrix cholesky(const Matrix& a) {
  require_symmetric_input(a, 1e-12, "cholesky");
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double pivot_tol = 1e-12 * max_diag;

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > pivot_tol)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky: pivot " + std::to_string(j) + " is not positive");
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

InverseLogdet inverse_and_logdet(const Matrix& a) {
  const Matrix l = cholesky(a);
  const std::size_t n = l.rows();

  double logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));

  // Solve L Y = I column by column, then A^{-1} = Y^T Y.
  Matrix y(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = c; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = c; k < i; ++k) s -= l(i, k) * y(k, c);
      y(i, c) = s / l(i, i);
    }
  }
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = i; k < n; ++k) s += y(k, i) * y(k, j);
      inv(i, j) = s;
      inv(j, i) = s;
    }
  return {std::move(inv), logdet};
}

SymmetricEigen symmetric_eigen(const Matrix& input) {
  require_symmetric_input(input, 1e-10, "symmetric_eigen");
  const std::size_t n = input.rows();

  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(n);

  const double scale = frobenius_norm(a);
  const double skip_tol = 1e-17 * scale;
  const double done_tol = 1e-16 * scale * static_cast<double>(n);

  bool converged = scale == 0.0;
  for (int sweep = 0; sweep < kJacobiSweepBudget && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= done_tol) {
      converged = true;
      break;
    }

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip_tol) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) > done_tol)
      throw Error(ErrorCode::NoConvergence, "symmetric_eigen: sweep budget exhausted");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::vector<std::complex<double>> general_eigenvalues(const Matrix& a) {
  if (a.empty() || !a.square())
    throw Error(ErrorCode::InvalidArgument, "general_eigenvalues: matrix must be square");
  if (!a.all_finite()) throw Error(ErrorCode::NonFinite, "general_eigenvalues: non-finite entry");

  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "general_eigenvalues: QR iteration failed");
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = ev(i);
  return out;
}

}  // namespace dopt
