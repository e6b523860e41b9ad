#pragma once

// Core vocabulary of approximate D-optimal design: candidate points, weights
// on the simplex, the information matrix M(w) = sum_i w_i x_i x_i^T, the
// variance function d_i = x_i^T M^{-1} x_i and the equivalence-theorem gap.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dopt/numerics.hpp"

namespace dopt {

/// Weights below this are treated as exact zeros (the point drops out).
inline constexpr double kClampThreshold = 1e-15;
/// Input weight sums further than this from 1 are rejected.
inline constexpr double kSimplexInputTolerance = 1e-9;

/// n candidate points in R^m, stored as the rows of an n x m matrix.
/// Construction validates n >= m >= 2 and full column rank.
class DesignSpace {
 public:
  explicit DesignSpace(Matrix points, std::vector<std::string> labels = {});

  std::size_t n() const noexcept { return points_.rows(); }
  std::size_t m() const noexcept { return points_.cols(); }
  const Matrix& points() const noexcept { return points_; }
  std::span<const double> point(std::size_t i) const { return points_.row(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// True iff every point has first coordinate exactly 1.
  bool has_intercept() const noexcept { return has_intercept_; }

  /// The sub-design made of the listed rows (validated like any other).
  DesignSpace restricted(std::span<const std::size_t> rows) const;

  friend bool operator==(const DesignSpace&, const DesignSpace&) = default;

 private:
  Matrix points_;
  std::vector<std::string> labels_;
  bool has_intercept_ = false;
};

/// A point of the closed simplex.  Entries below kClampThreshold are set to
/// zero and the vector is renormalised to sum to one.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> w);

  static WeightVector uniform(std::size_t n);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const noexcept { return w_; }
  bool active(std::size_t i) const { return w_[i] > 0.0; }
  /// Indices whose weight exceeds threshold.
  std::vector<std::size_t> support(double threshold = 0.0) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

struct InformationMatrix {
  Matrix m;
  Matrix inverse;
  double logdet = 0.0;
};

/// Throws SingularInformation when M(w) is not positive definite.
InformationMatrix information_matrix(const DesignSpace& x, const WeightVector& w);

/// d_i = x_i^T M^{-1} x_i for every candidate point.
std::vector<double> variance_function(const DesignSpace& x, const InformationMatrix& info);

/// max_i d_i - m.  Zero (up to rounding) exactly at a D-optimal design.
double equivalence_gap(const DesignSpace& x, const WeightVector& w);

double log_det(const DesignSpace& x, const WeightVector& w);

/// log det M(to) - log det M(from), evaluated in extended precision on the
/// sum-normalised weights so that the sign is trustworthy for tiny steps.
double logdet_gain(const DesignSpace& x, std::span<const double> from, std::span<const double> to);

}  // namespace dopt
