#include "dopt/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dopt {

namespace {

#if defined(__SIZEOF_FLOAT128__)
using wide_real = __float128;
#else
using wide_real = long double;
#endif

constexpr double kRankTolerance = 1e-10;

}  // namespace

DesignSpace::DesignSpace(Matrix points, std::vector<std::string> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  const std::size_t n = points_.rows();
  const std::size_t m = points_.cols();
  if (points_.empty() || m < 2 || n < m) {
    throw Error(ErrorCode::ShapeError, "design space needs n >= m >= 2 (got n=" +
                                           std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  if (!points_.all_finite()) throw Error(ErrorCode::NonFinite, "design space has non-finite entries");
  if (labels_.empty()) {
    labels_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels_.push_back("p" + std::to_string(i + 1));
  } else if (labels_.size() != n) {
    throw Error(ErrorCode::ShapeError, "label count does not match the number of points");
  }

  // Full rank: the moment matrix X^T X / n must be well away from singular.
  Matrix moment(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = points_.row(i);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) moment(j, k) += x[j] * x[k] / static_cast<double>(n);
  }
  const auto eig = symmetric_eigen(moment);
  if (!(eig.values.back() > kRankTolerance * eig.values.front())) {
    throw Error(ErrorCode::RankDeficient, "design matrix does not have full column rank");
  }

  has_intercept_ = true;
  for (std::size_t i = 0; i < n; ++i) has_intercept_ = has_intercept_ && points_(i, 0) == 1.0;
}

DesignSpace DesignSpace::restricted(std::span<const std::size_t> rows) const {
  if (rows.empty()) throw Error(ErrorCode::ShapeError, "empty restriction");
  Matrix sub(rows.size(), m());
  std::vector<std::string> sub_labels;
  sub_labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n()) throw Error(ErrorCode::InvalidArgument, "restriction index out of range");
    std::copy_n(point(rows[r]).begin(), m(), sub.row(r).begin());
    sub_labels.push_back(labels_[rows[r]]);
  }
  return DesignSpace(std::move(sub), std::move(sub_labels));
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw Error(ErrorCode::InvalidWeights, "empty weight vector");
  for (double v : w_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite weight");
    if (v < 0.0) throw Error(ErrorCode::InvalidWeights, "negative weight");
  }
  double sum = std::accumulate(w_.begin(), w_.end(), 0.0);
  if (std::abs(sum - 1.0) > kSimplexInputTolerance) {
    throw Error(ErrorCode::InvalidWeights, "weights do not sum to one");
  }
  bool clamped = false;
  for (double& v : w_) {
    if (v > 0.0 && v < kClampThreshold) {
      v = 0.0;
      clamped = true;
    }
  }
  if (clamped) sum = std::accumulate(w_.begin(), w_.end(), 0.0);
  if (!(sum > 0.0)) throw Error(ErrorCode::InvalidWeights, "all weights vanished");
  if (sum != 1.0)
    for (double& v : w_) v /= sum;
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidWeights, "empty weight vector");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::vector<std::size_t> WeightVector::support(double threshold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] > threshold) idx.push_back(i);
  return idx;
}

InformationMatrix information_matrix(const DesignSpace& x, const WeightVector& w) {
  if (w.size() != x.n()) throw Error(ErrorCode::ShapeError, "weight count does not match design");
  const std::size_t m = x.m();
  Matrix info(m, m);
  for (std::size_t i = 0; i < x.n(); ++i) {
    const double wi = w[i];
    if (wi == 0.0) continue;
    const auto xi = x.point(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double a = wi * xi[j];
      for (std::size_t k = 0; k <= j; ++k) info(j, k) += a * xi[k];
    }
  }
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < j; ++k) info(k, j) = info(j, k);

  try {
    auto [inverse, logdet] = inverse_and_logdet(info);
    return {std::move(info), std::move(inverse), logdet};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite)
      throw Error(ErrorCode::SingularInformation, "information matrix is singular");
    throw;
  }
}

std::vector<double> variance_function(const DesignSpace& x, const InformationMatrix& info) {
  const std::size_t m = x.m();
  std::vector<double> d(x.n());
  std::vector<double> tmp(m);
  for (std::size_t i = 0; i < x.n(); ++i) {
    const auto xi = x.point(i);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = dot(info.inverse.row(j), xi);
    d[i] = dot(xi, tmp);
  }
  return d;
}

double equivalence_gap(const DesignSpace& x, const WeightVector& w) {
  const auto d = variance_function(x, information_matrix(x, w));
  return *std::max_element(d.begin(), d.end()) - static_cast<double>(x.m());
}

double log_det(const DesignSpace& x, const WeightVector& w) {
  return information_matrix(x, w).logdet;
}

namespace {

wide_real normalized_determinant(const DesignSpace& x, std::span<const double> w) {
  const std::size_t m = x.m();
  wide_real sum = 0;
  for (double v : w) sum += v;
  std::vector<wide_real> a(m * m, wide_real(0));
  for (std::size_t i = 0; i < x.n(); ++i) {
    if (w[i] == 0.0) continue;
    const auto xi = x.point(i);
    const wide_real wi = wide_real(w[i]) / sum;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k <= j; ++k) a[j * m + k] += wi * wide_real(xi[j]) * wide_real(xi[k]);
  }
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < j; ++k) a[k * m + j] = a[j * m + k];
  return ldlt_determinant(std::move(a), m);
}

}  // namespace

double logdet_gain(const DesignSpace& x, std::span<const double> from, std::span<const double> to) {
  if (from.size() != x.n() || to.size() != x.n())
    throw Error(ErrorCode::ShapeError, "weight count does not match design");
  const wide_real det_from = normalized_determinant(x, from);
  const wide_real det_to = normalized_determinant(x, to);
  if (!(det_from > 0) || !(det_to > 0))
    throw Error(ErrorCode::SingularInformation, "information matrix is singular");
  return std::log1p(static_cast<double>(det_to / det_from - wide_real(1)));
}

}  // namespace dopt
