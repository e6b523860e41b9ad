#include <cmath>
#include <random>

#include "doctest.h"

#include "dopt/numerics.hpp"

using namespace dopt;

namespace {

Matrix random_spd(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = g(rng);
  return b * b.transposed() + 0.1 * Matrix::identity(n);
}

Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  return a;
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity") {
  CHECK(cholesky(Matrix::identity(2)) == Matrix::identity(2));
}

TEST_CASE("cholesky of [[4,2],[2,5]]") {
  const Matrix a{{4, 2}, {2, 5}};
  const Matrix l = cholesky(a);
  CHECK(max_abs_diff(l, Matrix{{2, 0}, {1, 2}}) < 1e-15);
  // LL^T = A by direct multiplication.
  CHECK(max_abs_diff(l * l.transposed(), a) < 1e-14);
}

TEST_CASE("cholesky rejects an indefinite matrix") {
  try {
    cholesky(Matrix{{1, 2}, {2, 1}});
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

TEST_CASE("cholesky rejects asymmetric and non-finite input") {
  CHECK_THROWS_AS(cholesky(Matrix{{1, 0.5}, {0.4, 1}}), Error);
  CHECK_THROWS_AS(cholesky(Matrix{{1, 0}, {0, NAN}}), Error);
}

TEST_CASE("pivot tolerance is relative to the largest diagonal entry") {
  // Singular at the 1e-12 relative level even though the raw pivot is positive.
  CHECK_THROWS_AS(cholesky(Matrix{{1e6, 0}, {0, 1e-7}}), Error);
  CHECK_NOTHROW(cholesky(Matrix{{1e-6, 0}, {0, 1e-7}}));
}

TEST_CASE("inverse_and_logdet on diagonal inputs") {
  auto id = inverse_and_logdet(Matrix::identity(3));
  CHECK(id.inverse == Matrix::identity(3));
  CHECK(id.logdet == 0.0);

  auto d = inverse_and_logdet(Matrix{{2, 0}, {0, 8}});
  CHECK(max_abs_diff(d.inverse, Matrix{{0.5, 0}, {0, 0.125}}) < 1e-15);
  CHECK(d.logdet == doctest::Approx(std::log(16.0)).epsilon(1e-14));
}

TEST_CASE("inverse_and_logdet: A A^{-1} = I on random SPD matrices") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 4u, 7u, 12u, 20u}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix a = random_spd(rng, n);
      const auto r = inverse_and_logdet(a);
      CHECK(max_abs_diff(a * r.inverse, Matrix::identity(n)) < 1e-9);
      // Independent route: the log-determinant is the sum of log-eigenvalues.
      double eig_logdet = 0.0;
      for (double v : symmetric_eigen(a).values) eig_logdet += std::log(v);
      CHECK(std::abs(eig_logdet - r.logdet) < 1e-9);
    }
  }
}

TEST_CASE("symmetric_eigen: simple spectra") {
  const double d[] = {3, 1, 2};
  auto e = symmetric_eigen(Matrix::diagonal(d));
  CHECK(e.values == std::vector<double>{3, 2, 1});

  auto swap = symmetric_eigen(Matrix{{0, 1}, {1, 0}});
  CHECK(swap.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(swap.values[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("symmetric_eigen of the similarity matrix for the two-point design") {
  // D = 2 I at w = (1/2, 1/2), so D* = 4 I and Diag(w)^{1/2} D* Diag(w)^{1/2} = 2 I.
  auto e = symmetric_eigen(Matrix{{2, 0}, {0, 2}});
  CHECK(e.values == std::vector<double>{2, 2});
}

TEST_CASE("symmetric_eigen reconstructs random symmetric matrices") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {2u, 3u, 5u, 10u, 20u, 40u}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix a = random_symmetric(rng, n);
      const auto e = symmetric_eigen(a);
      for (std::size_t k = 1; k < n; ++k) CHECK(e.values[k - 1] >= e.values[k]);
      const Matrix& v = e.vectors;
      CHECK(max_abs_diff(v.transposed() * v, Matrix::identity(n)) < 1e-10);
      const Matrix recon = v * Matrix::diagonal(e.values) * v.transposed();
      CHECK(frobenius_norm(recon - a) <= 1e-10 * frobenius_norm(a));
    }
  }
}

TEST_CASE("symmetric_eigen handles the zero matrix and repeated eigenvalues") {
  auto z = symmetric_eigen(Matrix(3, 3));
  CHECK(z.values == std::vector<double>{0, 0, 0});
  Matrix ones(4, 4, 1.0);
  auto e = symmetric_eigen(ones);
  CHECK(e.values[0] == doctest::Approx(4.0));
  for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(e.values[k]) < 1e-14);
}

TEST_CASE("general_eigenvalues of a rotation-free upper triangular matrix") {
  auto ev = general_eigenvalues(Matrix{{2, 5}, {0, -1}});
  std::vector<double> re{ev[0].real(), ev[1].real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-1.0));
  CHECK(re[1] == doctest::Approx(2.0));
  auto rot = general_eigenvalues(Matrix{{0, -1}, {1, 0}});
  CHECK(std::abs(rot[0].imag()) == doctest::Approx(1.0));
}

TEST_CASE("ldlt_determinant in long double agrees with the Cholesky log-determinant") {
  std::mt19937_64 rng(3);
  const Matrix a = random_spd(rng, 5);
  std::vector<long double> w(a.data().begin(), a.data().end());
  const long double det = ldlt_determinant(w, 5);
  CHECK(std::log(static_cast<double>(det)) == doctest::Approx(inverse_and_logdet(a).logdet).epsilon(1e-12));
}
