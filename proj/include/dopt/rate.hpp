#pragma once

// Local convergence analysis of the multiplicative update around an interior
// optimum w*.  With d_ij = x_i^T M^{-1}(w*) x_j the Jacobian of the update is
//
//   R(alpha) = I - Diag(w*) D* / (m - alpha),   D*_ij = d_ij^2,
//
// and the global rate is its spectral radius on the sum-zero subspace.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dopt/design.hpp"
#include "dopt/solvers.hpp"

namespace dopt {

/// max_i |d_ii - m| allowed before a point is refused as an interior optimum.
inline constexpr double kInteriorTolerance = 1e-6;
/// Weights above this count as support points after convergence.
inline constexpr double kSupportThreshold = 1e-8;

struct CrossProductMatrix {
  Matrix d;      // X M^{-1} X^T
  Matrix dstar;  // entrywise square of d
};

CrossProductMatrix cross_products(const DesignSpace& x, const WeightVector& w);

/// Entrywise Jacobian of the alpha-update at wstar.  Throws
/// NotInteriorOptimum unless every d_ii is within kInteriorTolerance of m.
Matrix matrix_rate(const DesignSpace& x, const WeightVector& wstar, double alpha);

/// Orthonormal basis (n x (n-1), Helmert contrasts) of {v : sum v_i = 0}.
Matrix sum_zero_basis(std::size_t n);

/// Eigenvalues of R compressed onto the sum-zero subspace, descending.
/// Throws ComplexSpectrum if an eigenvalue has |Im| > 1e-6.
std::vector<double> gamma_spectrum(const Matrix& r);

/// Largest modulus in the list.
double global_rate(std::span<const double> eigenvalues);

/// 1 - m (1 - r0) / (m - alpha) when r0 >= 2 alpha / m, nothing otherwise.
std::optional<double> predicted_rate(double r0, double alpha, std::size_t m);

enum class RateAnchor {
  plateau,       // first window of step ratios whose spread is small
  relative_gap,  // ratios read when max_i d_i / m - 1 first drops to a threshold
};

struct EmpiricalRateOptions {
  RateAnchor anchor = RateAnchor::plateau;
  std::size_t window = 25;
  double spread_tolerance = 1e-4;
  double relative_gap = 1e-4;
  std::size_t anchor_window = 5;
  std::size_t min_iterations = 50;
};

struct EmpiricalRate {
  bool stable = false;
  double rate = 0.0;            // estimate of lim |w(t+1)-w(t)| / |w(t)-w(t-1)|
  std::size_t iteration = 0;    // step index the estimate was read at
  double spread = 0.0;          // max - min of the ratios used
  std::string note;             // why an estimate is unstable
};

/// Estimates the limiting ratio of successive step norms.  An unstable
/// result is reported in the return value, not thrown.
EmpiricalRate empirical_rate(const SolveTrace& trace, const EmpiricalRateOptions& options = {});

struct RateReport {
  double alpha = 0.0;
  Matrix r;
  std::vector<double> gamma_eigenvalues;
  double global_rate = 0.0;
  double predicted_speed_ratio = 1.0;   // m / (m - alpha)
  bool rate_relation_applicable = false;  // r(0) >= 2 alpha / m
  std::optional<double> predicted_rate;   // from r(0) when applicable
  double speed_identity_residual = 0.0;   // max |(I-R(a)) - m/(m-a) (I-R(0))|
  bool speed_identity_holds = false;      // residual <= 1e-10
  /// Max difference between the compressed spectrum and the one obtained
  /// from the symmetric similarity Diag(w)^{1/2} D* Diag(w)^{1/2}; set when
  /// every weight is positive.
  std::optional<double> similarity_residual;
};

std::vector<RateReport> rate_summary(const DesignSpace& x, const WeightVector& wstar,
                                     std::span<const double> alphas);

struct SupportRestriction {
  DesignSpace design;
  WeightVector weights;
  std::vector<std::size_t> indices;  // rows of the original design
};

/// Drops points whose weight is at most threshold and renormalises the rest.
SupportRestriction restrict_to_support(const DesignSpace& x, const WeightVector& w,
                                       double threshold = kSupportThreshold);

}  // namespace dopt
