#include "dopt/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dopt {

CrossProductMatrix cross_products(const DesignSpace& x, const WeightVector& w) {
  const auto info = information_matrix(x, w);
  const Matrix& pts = x.points();
  Matrix d = pts * info.inverse * pts.transposed();
  const std::size_t n = x.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) d(i, j) = d(j, i) = 0.5 * (d(i, j) + d(j, i));
  Matrix dstar(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dstar(i, j) = d(i, j) * d(i, j);
  return {std::move(d), std::move(dstar)};
}

namespace {

void check_alpha(double alpha, std::size_t m) {
  if (!(alpha >= 0.0) || !(alpha < static_cast<double>(m)))
    throw Error(ErrorCode::BadParameter, "alpha must satisfy 0 <= alpha < m");
}

Matrix rate_from_cross(const CrossProductMatrix& cp, const WeightVector& w, std::size_t m,
                       double alpha) {
  const std::size_t n = w.size();
  const double denom = static_cast<double>(m) - alpha;
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) r(i, j) = -w[i] * cp.dstar(i, j) / denom;
    r(i, i) = (cp.d(i, i) - w[i] * cp.dstar(i, i) - alpha) / denom;
  }
  return r;
}

void require_interior(const CrossProductMatrix& cp, std::size_t m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cp.d.rows(); ++i)
    worst = std::max(worst, std::abs(cp.d(i, i) - static_cast<double>(m)));
  if (!(worst <= kInteriorTolerance)) {
    throw Error(ErrorCode::NotInteriorOptimum,
                "weights are not an interior optimum (max |d_ii - m| = " + std::to_string(worst) +
                    ")");
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double spread(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

Matrix matrix_rate(const DesignSpace& x, const WeightVector& wstar, double alpha) {
  check_alpha(alpha, x.m());
  const auto cp = cross_products(x, wstar);
  require_interior(cp, x.m());
  return rate_from_cross(cp, wstar, x.m(), alpha);
}

Matrix sum_zero_basis(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "sum-zero subspace needs n >= 2");
  Matrix b(n, n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double scale = 1.0 / std::sqrt(kk * (kk + 1.0));
    for (std::size_t i = 0; i < k; ++i) b(i, k - 1) = scale;
    b(k, k - 1) = -kk * scale;
  }
  return b;
}

std::vector<double> gamma_spectrum(const Matrix& r) {
  if (r.empty() || !r.square()) throw Error(ErrorCode::InvalidArgument, "rate matrix must be square");
  const std::size_t n = r.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "rate matrix must be at least 2 x 2");
  const Matrix b = sum_zero_basis(n);
  const Matrix compressed = b.transposed() * r * b;

  std::vector<double> out;
  out.reserve(n - 1);
  for (const auto& z : general_eigenvalues(compressed)) {
    if (std::abs(z.imag()) > 1e-6)
      throw Error(ErrorCode::ComplexSpectrum, "rate matrix has a complex eigenvalue on the sum-zero subspace");
    out.push_back(z.real());
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double global_rate(std::span<const double> eigenvalues) {
  if (eigenvalues.empty()) throw Error(ErrorCode::InvalidArgument, "empty eigenvalue list");
  double r = 0.0;
  for (double v : eigenvalues) r = std::max(r, std::abs(v));
  return r;
}

std::optional<double> predicted_rate(double r0, double alpha, std::size_t m) {
  const double md = static_cast<double>(m);
  if (!(r0 >= 0.0 && r0 <= 1.0)) throw Error(ErrorCode::BadParameter, "r(0) must lie in [0, 1]");
  check_alpha(alpha, m);
  if (r0 < 2.0 * alpha / md) return std::nullopt;
  return 1.0 - md * (1.0 - r0) / (md - alpha);
}

EmpiricalRate empirical_rate(const SolveTrace& trace, const EmpiricalRateOptions& options) {
  EmpiricalRate out;
  const auto& s = trace.step_norms;
  if (s.size() < options.min_iterations) {
    out.note = "fewer than " + std::to_string(options.min_iterations) + " iterations recorded";
    return out;
  }
  std::vector<double> ratios;
  ratios.reserve(s.size());
  for (std::size_t t = 0; t + 1 < s.size(); ++t) {
    ratios.push_back(s[t] > 0.0 ? s[t + 1] / s[t] : std::numeric_limits<double>::quiet_NaN());
  }

  if (options.anchor == RateAnchor::plateau) {
    const std::size_t k = options.window;
    for (std::size_t end = k; end <= ratios.size(); ++end) {
      const std::span<const double> win(ratios.data() + end - k, k);
      if (std::any_of(win.begin(), win.end(), [](double v) { return !std::isfinite(v); })) continue;
      const double sp = spread(win);
      if (sp < options.spread_tolerance) {
        out.stable = true;
        out.rate = median({win.begin(), win.end()});
        out.iteration = end;
        out.spread = sp;
        return out;
      }
    }
    out.note = "step-norm ratios never settled";
    return out;
  }

  // relative_gap: find the first iterate whose relative gap meets the threshold.
  if (trace.dimension == 0 || trace.gaps.size() != s.size() + 1) {
    out.note = "trace lacks equivalence gaps";
    return out;
  }
  const double md = static_cast<double>(trace.dimension);
  std::size_t hit = trace.gaps.size();
  for (std::size_t k = 0; k < trace.gaps.size(); ++k) {
    if (trace.gaps[k] / md <= options.relative_gap) {
      hit = k;
      break;
    }
  }
  if (hit == trace.gaps.size()) {
    out.note = "relative gap never reached the anchor threshold";
    return out;
  }
  // Iterate `hit` is reached by step hit-1; the last ratio is s[hit-1]/s[hit-2].
  if (hit < options.anchor_window + 1) {
    out.note = "anchor reached before enough steps were taken";
    return out;
  }
  const std::span<const double> win(ratios.data() + hit - 1 - options.anchor_window, options.anchor_window);
  if (std::any_of(win.begin(), win.end(), [](double v) { return !std::isfinite(v); })) {
    out.note = "zero step before the anchor";
    return out;
  }
  out.stable = true;
  out.rate = median({win.begin(), win.end()});
  out.iteration = hit - 1;
  out.spread = spread(win);
  return out;
}

std::vector<RateReport> rate_summary(const DesignSpace& x, const WeightVector& wstar,
                                     std::span<const double> alphas) {
  const std::size_t m = x.m();
  const std::size_t n = x.n();
  const double md = static_cast<double>(m);
  for (double a : alphas) check_alpha(a, m);

  const auto cp = cross_products(x, wstar);
  require_interior(cp, m);
  const Matrix r0 = rate_from_cross(cp, wstar, m, 0.0);
  const double rate0 = global_rate(gamma_spectrum(r0));

  // Symmetric route: Diag(w)^{1/2} D* Diag(w)^{1/2}, whose top eigenvalue m
  // belongs to the direction outside the sum-zero subspace.
  std::optional<std::vector<double>> similarity;
  if (wstar.support().size() == n) {
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s(i, j) = std::sqrt(wstar[i] * wstar[j]) * cp.dstar(i, j);
    auto values = symmetric_eigen(s).values;
    values.erase(values.begin());
    similarity = std::move(values);
  }

  const Matrix eye = Matrix::identity(n);
  std::vector<RateReport> reports;
  reports.reserve(alphas.size());
  for (double alpha : alphas) {
    RateReport rep;
    rep.alpha = alpha;
    rep.r = rate_from_cross(cp, wstar, m, alpha);
    rep.gamma_eigenvalues = gamma_spectrum(rep.r);
    rep.global_rate = global_rate(rep.gamma_eigenvalues);
    rep.predicted_speed_ratio = md / (md - alpha);
    rep.rate_relation_applicable = rate0 >= 2.0 * alpha / md;
    rep.predicted_rate = predicted_rate(std::clamp(rate0, 0.0, 1.0), alpha, m);

    const Matrix lhs = eye - rep.r;
    const Matrix rhs = rep.predicted_speed_ratio * (eye - r0);
    rep.speed_identity_residual = max_abs_diff(lhs, rhs);
    rep.speed_identity_holds = rep.speed_identity_residual <= 1e-10;

    if (similarity) {
      std::vector<double> sim;
      sim.reserve(similarity->size());
      for (double lambda : *similarity) sim.push_back(1.0 - lambda / (md - alpha));
      std::sort(sim.begin(), sim.end(), std::greater<>());
      double worst = 0.0;
      for (std::size_t k = 0; k < sim.size(); ++k)
        worst = std::max(worst, std::abs(sim[k] - rep.gamma_eigenvalues[k]));
      rep.similarity_residual = worst;
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

SupportRestriction restrict_to_support(const DesignSpace& x, const WeightVector& w, double threshold) {
  if (w.size() != x.n()) throw Error(ErrorCode::ShapeError, "weight count does not match design");
  auto idx = w.support(threshold);
  DesignSpace sub = x.restricted(idx);
  std::vector<double> v;
  v.reserve(idx.size());
  for (std::size_t i : idx) v.push_back(w[i]);
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& e : v) e /= sum;
  return {std::move(sub), WeightVector(std::move(v)), std::move(idx)};
}

}  // namespace dopt
