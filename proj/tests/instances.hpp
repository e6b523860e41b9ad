#pragma once

// Test instances shared by the unit and acceptance suites.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dopt/design.hpp"

namespace dopt::testing {

inline DesignSpace two_point() { return DesignSpace(Matrix{{1, -1}, {1, 1}}); }

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> g;
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = g(rng);
  return a;
}

/// Random invertible m x m matrix (well away from singular).
inline Matrix random_invertible(std::mt19937_64& rng, std::size_t m) {
  return random_matrix(rng, m, m) + 3.0 * Matrix::identity(m);
}

inline DesignSpace random_intercept_design(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  Matrix pts = random_matrix(rng, n, m);
  for (std::size_t i = 0; i < n; ++i) pts(i, 0) = 1.0;
  return DesignSpace(pts);
}

inline WeightVector random_interior(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0;
  for (auto& v : w) s += (v = u(rng));
  for (auto& v : w) v /= s;
  return WeightVector(std::move(w));
}

/// n = m points: uniform weights are the interior optimum.
inline DesignSpace random_saturated(std::mt19937_64& rng, std::size_t m) {
  return DesignSpace(random_invertible(rng, m));
}

/// Regular polygon x_i = (1, cos t_i, sin t_i), t_i = 2 pi i / n, mapped by A.
/// Uniform weights give d_i = 3 for every point.
inline DesignSpace polygon(std::size_t n, const Matrix& a = Matrix::identity(3)) {
  Matrix pts(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    pts(i, 0) = 1.0;
    pts(i, 1) = std::cos(t);
    pts(i, 2) = std::sin(t);
  }
  return DesignSpace(pts * a);
}

/// Full 2^k factorial with intercept and main effects, mapped by A.
/// Uniform weights give d_i = k + 1 for every point.
inline DesignSpace factorial(std::size_t k, const Matrix& a) {
  const std::size_t n = std::size_t{1} << k;
  Matrix pts(n, k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    pts(i, 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) pts(i, j + 1) = (i >> j) & 1 ? 1.0 : -1.0;
  }
  return DesignSpace(pts * a);
}

}  // namespace dopt::testing
