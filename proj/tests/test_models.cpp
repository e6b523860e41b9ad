#include <array>
#include <cmath>
#include <sstream>

#include "doctest.h"

#include "dopt/models.hpp"
#include "dopt/solvers.hpp"

using namespace dopt;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("exponential grid") {
  const auto x = build_x1();
  CHECK(x.n() == 20);
  CHECK(x.m() == 3);
  CHECK(x.has_intercept());
  const auto last = x.point(19);
  CHECK(last[0] == 1.0);
  CHECK(last[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(last[2] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const auto first = x.point(0);
  CHECK(first[2] == doctest::Approx(0.05 * std::exp(-0.05)).epsilon(1e-15));
  CHECK(x.labels()[0] == "s=0.05");
}

TEST_CASE("rational grid") {
  const auto x = build_x2();
  const auto mid = x.point(9);  // s = 0.5
  CHECK(mid[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mid[2] == doctest::Approx(0.5).epsilon(1e-15));
  for (double k : {0.1, 0.5, 2.0}) {
    const auto xk = build_x2(k);
    for (std::size_t i = 0; i < xk.n(); ++i) {
      const double s = static_cast<double>(i + 1) / 20.0;
      CHECK(xk.point(i)[2] == doctest::Approx(xk.point(i)[1] / (k + s)).epsilon(1e-14));
    }
  }
  CHECK(code_of([] { build_x2(0.0); }) == ErrorCode::BadParameter);
  CHECK(code_of([] { build_x2(-1.0); }) == ErrorCode::BadParameter);
  // kappa -> 0 collapses the second column to a constant.
  CHECK(code_of([] { build_x2(1e-9); }) == ErrorCode::RankDeficient);
}

TEST_CASE("cubic grid") {
  const auto x = build_x3();
  CHECK(x.m() == 4);
  const auto last = x.point(19);
  for (double v : last) CHECK(v == doctest::Approx(1.0));

  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 20.0);
  CHECK(max_abs_diff(build_polynomial(3, grid).points(), x.points()) < 1e-15);
}

TEST_CASE("cubic optimum is symmetric about the grid centre") {
  auto config = SolverConfig{};
  config.gap_tolerance = 1e-10;
  const auto x = build_x3();
  const auto res = solve(x, WeightVector::uniform(20), config);
  CHECK(res.trace.termination == Termination::gap_met);
  // The grid is symmetric about s = 0.525, so index i mirrors 19 - i.
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(res.weights[i] == doctest::Approx(res.weights[19 - i]).epsilon(1e-3).scale(1e-3));
  }
  std::size_t heavy = 0;
  for (double w : res.weights.values()) heavy += w > 0.2;
  CHECK(heavy == 4);
}

TEST_CASE("linear and quadratic polynomials on symmetric grids") {
  const auto x1 = build_polynomial(1, symmetric_grid(2));
  CHECK(max_abs_diff(x1.points(), Matrix{{1, -1}, {1, 1}}) == 0.0);

  // Oracle: brute-force grid search of log det over the simplex at step 1/200.
  const auto x2 = build_polynomial(2, symmetric_grid(3));
  double best = -1e300;
  std::array<double, 3> arg{};
  for (int a = 1; a < 200; ++a)
    for (int b = 1; a + b < 200; ++b) {
      const std::array<double, 3> w{a / 200.0, b / 200.0, (200 - a - b) / 200.0};
      // det of the 3x3 moment matrix for points -1, 0, 1 reduces to 4 w0 w1 w2.
      const double v = std::log(4 * w[0] * w[1] * w[2]);
      if (v > best) {
        best = v;
        arg = w;
      }
    }
  const auto res = solve(x2, WeightVector({0.2, 0.5, 0.3}), SolverConfig{});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(res.weights[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
    CHECK(std::abs(res.weights[i] - arg[i]) <= 1.0 / 200.0);
  }
  CHECK(log_det(x2, res.weights) == doctest::Approx(best).epsilon(1e-4));

  CHECK(code_of([] {
          const std::vector<double> g{0.0, 0.0, 1.0};
          build_polynomial(2, g);
        }) == ErrorCode::RankDeficient);
}

TEST_CASE("custom transform") {
  GridSpec spec;
  spec.count = 10;
  spec.transform = transform::Custom{{[](double) { return 1.0; }, [](double s) { return std::sin(s); }}};
  const auto x = build_from_grid(spec);
  CHECK(x.m() == 2);
  CHECK(x.point(9)[1] == doctest::Approx(std::sin(1.0)));
}

TEST_CASE("csv round trip is exact and deterministic") {
  const auto x = build_x2(0.37);
  std::ostringstream a;
  write_design_csv(a, x);
  std::istringstream in(a.str());
  const auto back = load_design_csv(in);
  CHECK(back.points() == x.points());
  std::ostringstream b;
  write_design_csv(b, back);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("x1,x2,x3\n", 0) == 0);
}

TEST_CASE("csv without header") {
  std::istringstream in("1,0\n0,1\n1,1\n");
  const auto x = load_design_csv(in);
  CHECK(x.n() == 3);
  CHECK(x.m() == 2);
}

TEST_CASE("csv errors") {
  CHECK(code_of([] {
          std::istringstream in("1,2\n3\n");
          load_design_csv(in);
        }) == ErrorCode::ShapeError);
  CHECK(code_of([] {
          // 3 points in 4 dimensions cannot be a design.
          std::istringstream in("1,0,0,0\n0,1,0,0\n0,0,1,0\n");
          load_design_csv(in);
        }) == ErrorCode::ShapeError);
  CHECK(code_of([] {
          std::istringstream in("x1,x2\n1,abc\n0,1\n");
          load_design_csv(in);
        }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          std::istringstream in("1,1\n2,2\n3,3\n");
          load_design_csv(in);
        }) == ErrorCode::RankDeficient);
  CHECK(code_of([] { load_design_csv_file("/nonexistent/design.csv"); }) == ErrorCode::ParseError);
}
