#pragma once

// Multiplicative algorithms for D-optimal weights.
//
//   w_i' = w_i (d_i - alpha) / (m - alpha),  d_i = x_i^T M^{-1}(w) x_i
//
// alpha = 0 is the classical algorithm, alpha = 1 coincides with the centred
// (intercept) variant, and the dynamic rule picks alpha = min_i d_i / 2 at
// every step.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "dopt/design.hpp"

namespace dopt {

enum class Variant {
  algorithm_I,            // alpha = 0
  algorithm_II_centered,  // centred update on intercept models
  fixed_alpha,            // alpha taken from SolverConfig::alpha
  dynamic_alpha,          // alpha = min_i d_i / 2 each step
};

enum class Termination { gap_met, step_met, max_iters, singular, oscillation_detected };

std::string_view variant_name(Variant v) noexcept;
std::string_view termination_name(Termination t) noexcept;

struct SolverConfig {
  Variant variant = Variant::algorithm_I;
  double alpha = 0.0;
  double gap_tolerance = 1e-6;
  double step_tolerance = 1e-14;
  std::size_t max_iterations = 500000;
  bool record_trace = false;
  /// Record extended-precision log-det increments (used by verify_monotone).
  bool exact_gains = true;

  static SolverConfig fixed(double alpha) {
    SolverConfig c;
    c.variant = Variant::fixed_alpha;
    c.alpha = alpha;
    return c;
  }
  static SolverConfig with_variant(Variant v) {
    SolverConfig c;
    c.variant = v;
    return c;
  }
};

/// Iteration history.  Per-iterate sequences (logdets, gaps, iterates) have
/// one more entry than per-step sequences (alphas, step_norms, gains).
struct SolveTrace {
  std::vector<WeightVector> iterates;  // only with record_trace
  std::vector<double> logdets;
  std::vector<double> gaps;
  std::vector<double> alphas;
  std::vector<double> step_norms;
  std::vector<double> gains;
  Termination termination = Termination::max_iters;
  std::size_t dimension = 0;  // m of the design that produced the trace

  std::size_t iterations() const noexcept { return step_norms.size(); }
};

struct SolveResult {
  WeightVector weights;
  SolveTrace trace;
};

/// One step of the general update.  Requires 0 <= alpha < m; throws
/// NegativeWeight when alpha exceeds min d_i over the active points.
WeightVector step_general(const DesignSpace& x, const WeightVector& w, double alpha);

/// One step of the centred update for intercept models
/// (x_i = (1, z_i)):  w_i' = w_i (z_i - zbar)^T M_c^{-1} (z_i - zbar) / (m - 1).
WeightVector step_centered(const DesignSpace& x, const WeightVector& w);

/// alpha = min_i d_i / 2, taken over every candidate point.
double dynamic_alpha(const DesignSpace& x, const WeightVector& w);

/// Runs the configured variant from w0 until the equivalence gap drops to
/// gap_tolerance or a guard fires.  Throws SingularStart if M(w0) is
/// singular and BadParameter/NoIntercept on an unusable config.
SolveResult solve(const DesignSpace& x, const WeightVector& w0, const SolverConfig& config);

/// Window and thresholds of the oscillation guard in solve().
inline constexpr std::size_t kOscillationWindow = 50;

struct MonotoneVerdict {
  std::vector<std::size_t> decreases;   // step index with a log-det drop > 1e-12
  std::vector<std::size_t> flat_steps;  // strict mode: no gain despite movement
  bool ok() const noexcept { return decreases.empty() && flat_steps.empty(); }
};

/// Checks that log det M(w) never decreased along the trace.  Strict mode
/// also flags steps with non-positive gain whose step norm exceeds 1e-10.
MonotoneVerdict verify_monotone(const SolveTrace& trace, bool strict);

}  // namespace dopt
