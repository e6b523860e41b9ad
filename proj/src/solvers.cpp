#include "dopt/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dopt {

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::algorithm_I: return "algorithm_I";
    case Variant::algorithm_II_centered: return "algorithm_II_centered";
    case Variant::fixed_alpha: return "fixed_alpha";
    case Variant::dynamic_alpha: return "dynamic_alpha";
  }
  return "unknown";
}

std::string_view termination_name(Termination t) noexcept {
  switch (t) {
    case Termination::gap_met: return "gap_met";
    case Termination::step_met: return "step_met";
    case Termination::max_iters: return "max_iters";
    case Termination::singular: return "singular";
    case Termination::oscillation_detected: return "oscillation_detected";
  }
  return "unknown";
}

namespace {

void check_alpha(double alpha, std::size_t m) {
  if (!(alpha >= 0.0) || !(alpha < static_cast<double>(m))) {
    throw Error(ErrorCode::BadParameter,
                "alpha must satisfy 0 <= alpha < m (alpha=" + std::to_string(alpha) +
                    ", m=" + std::to_string(m) + ")");
  }
}

double min_active(const WeightVector& w, const std::vector<double>& d) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i)
    if (w.active(i)) lo = std::min(lo, d[i]);
  return lo;
}

WeightVector general_update(const WeightVector& w, const std::vector<double>& d, double alpha,
                            std::size_t m) {
  if (alpha > min_active(w, d)) {
    throw Error(ErrorCode::NegativeWeight,
                "alpha exceeds min_i d_i on the support; the update would leave the simplex");
  }
  const double denom = static_cast<double>(m) - alpha;
  std::vector<double> next(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) next[i] = w.active(i) ? w[i] * (d[i] - alpha) / denom : 0.0;
  return WeightVector(std::move(next));
}

WeightVector centered_update(const DesignSpace& x, const WeightVector& w) {
  if (!x.has_intercept())
    throw Error(ErrorCode::NoIntercept, "centred update needs an intercept column of ones");
  const std::size_t n = x.n();
  const std::size_t q = x.m() - 1;

  std::vector<double> zbar(q, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < q; ++j) zbar[j] += w[i] * x.point(i)[j + 1];

  Matrix mc(q, q);
  std::vector<double> dz(q);
  for (std::size_t i = 0; i < n; ++i) {
    if (!w.active(i)) continue;
    for (std::size_t j = 0; j < q; ++j) dz[j] = x.point(i)[j + 1] - zbar[j];
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < q; ++k) mc(j, k) += w[i] * dz[j] * dz[k];
  }
  Matrix mc_inv;
  try {
    mc_inv = inverse_and_logdet(mc).inverse;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite)
      throw Error(ErrorCode::SingularInformation, "centred information matrix is singular");
    throw;
  }

  std::vector<double> next(n, 0.0);
  std::vector<double> tmp(q);
  for (std::size_t i = 0; i < n; ++i) {
    if (!w.active(i)) continue;
    for (std::size_t j = 0; j < q; ++j) dz[j] = x.point(i)[j + 1] - zbar[j];
    for (std::size_t j = 0; j < q; ++j) tmp[j] = dot(mc_inv.row(j), dz);
    next[i] = w[i] * dot(dz, tmp) / static_cast<double>(q);
  }
  return WeightVector(std::move(next));
}

double half_min(const std::vector<double>& d) { return 0.5 * *std::min_element(d.begin(), d.end()); }

double step_norm(const WeightVector& a, const WeightVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

bool oscillating(const SolveTrace& trace, double gap_tolerance) {
  const std::size_t t = trace.iterations();
  if (t < kOscillationWindow) return false;
  const auto first = trace.step_norms.end() - static_cast<std::ptrdiff_t>(kOscillationWindow);
  const double min_step = *std::min_element(first, trace.step_norms.end());
  const double decrease = *first - trace.step_norms.back();
  const double gap_then = trace.gaps[t - kOscillationWindow];
  const double gap_now = trace.gaps[t];
  const bool stalled = gap_now > gap_tolerance && gap_now >= (1.0 - 1e-3) * gap_then;
  return stalled && min_step > 10.0 * std::max(decrease, 0.0);
}

}  // namespace

WeightVector step_general(const DesignSpace& x, const WeightVector& w, double alpha) {
  check_alpha(alpha, x.m());
  const auto d = variance_function(x, information_matrix(x, w));
  return general_update(w, d, alpha, x.m());
}

WeightVector step_centered(const DesignSpace& x, const WeightVector& w) {
  if (w.size() != x.n()) throw Error(ErrorCode::ShapeError, "weight count does not match design");
  if (!x.has_intercept())
    throw Error(ErrorCode::NoIntercept, "centred update needs an intercept column of ones");
  information_matrix(x, w);  // w must lie in Omega_+
  return centered_update(x, w);
}

double dynamic_alpha(const DesignSpace& x, const WeightVector& w) {
  return half_min(variance_function(x, information_matrix(x, w)));
}

SolveResult solve(const DesignSpace& x, const WeightVector& w0, const SolverConfig& config) {
  const std::size_t m = x.m();
  if (!(config.gap_tolerance > 0.0) || !(config.step_tolerance > 0.0))
    throw Error(ErrorCode::BadParameter, "tolerances must be positive");
  if (config.variant == Variant::fixed_alpha) check_alpha(config.alpha, m);
  if (config.variant == Variant::algorithm_II_centered && !x.has_intercept())
    throw Error(ErrorCode::NoIntercept, "algorithm II needs an intercept column of ones");
  if (w0.size() != x.n()) throw Error(ErrorCode::ShapeError, "weight count does not match design");

  InformationMatrix info;
  try {
    info = information_matrix(x, w0);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularInformation)
      throw Error(ErrorCode::SingularStart, "information matrix of the starting design is singular");
    throw;
  }

  WeightVector w = w0;
  SolveTrace trace;
  trace.dimension = m;
  auto d = variance_function(x, info);
  const auto gap_of = [m](const std::vector<double>& dv) {
    return *std::max_element(dv.begin(), dv.end()) - static_cast<double>(m);
  };
  trace.logdets.push_back(info.logdet);
  trace.gaps.push_back(gap_of(d));
  if (config.record_trace) trace.iterates.push_back(w);

  while (true) {
    if (trace.gaps.back() <= config.gap_tolerance) {
      trace.termination = Termination::gap_met;
      break;
    }
    if (!trace.step_norms.empty() && trace.step_norms.back() < config.step_tolerance) {
      trace.termination = Termination::step_met;
      break;
    }
    if (oscillating(trace, config.gap_tolerance)) {
      trace.termination = Termination::oscillation_detected;
      break;
    }
    if (trace.iterations() >= config.max_iterations) {
      trace.termination = Termination::max_iters;
      break;
    }

    double alpha = 0.0;
    std::optional<WeightVector> next;
    try {
      switch (config.variant) {
        case Variant::algorithm_I:
          next = general_update(w, d, 0.0, m);
          break;
        case Variant::algorithm_II_centered:
          alpha = 1.0;
          next = centered_update(x, w);
          break;
        case Variant::fixed_alpha:
          alpha = config.alpha;
          next = general_update(w, d, alpha, m);
          break;
        case Variant::dynamic_alpha:
          alpha = half_min(d);
          next = general_update(w, d, alpha, m);
          break;
      }
      info = information_matrix(x, *next);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularInformation) throw;
      trace.termination = Termination::singular;
      break;
    }

    d = variance_function(x, info);
    trace.alphas.push_back(alpha);
    trace.step_norms.push_back(step_norm(*next, w));
    if (config.exact_gains) trace.gains.push_back(logdet_gain(x, w.values(), next->values()));
    trace.logdets.push_back(info.logdet);
    trace.gaps.push_back(gap_of(d));
    w = std::move(*next);
    if (config.record_trace) trace.iterates.push_back(w);
  }
  return {std::move(w), std::move(trace)};
}

MonotoneVerdict verify_monotone(const SolveTrace& trace, bool strict) {
  if (trace.logdets.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "trace needs at least two log-determinants");
  const std::size_t steps = trace.logdets.size() - 1;
  const bool have_gains = trace.gains.size() == steps;

  MonotoneVerdict verdict;
  for (std::size_t t = 0; t < steps; ++t) {
    const double gain = have_gains ? trace.gains[t] : trace.logdets[t + 1] - trace.logdets[t];
    if (gain < -1e-12) {
      verdict.decreases.push_back(t);
    } else if (strict && gain <= 0.0 && t < trace.step_norms.size() && trace.step_norms[t] > 1e-10) {
      verdict.flat_steps.push_back(t);
    }
  }
  return verdict;
}

}  // namespace dopt
