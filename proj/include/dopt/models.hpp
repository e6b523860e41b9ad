#pragma once

// Design-space builders for the regression models used in the numerical
// study, plus CSV ingestion/emission of arbitrary candidate sets.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dopt/design.hpp"

namespace dopt {

namespace transform {
/// x = (1, e^{-s}, s e^{-s})
struct Exponential {};
/// x = (1, s/(kappa+s), s/(kappa+s)^2), the Michaelis-Menten linearisation.
struct Rational {
  double kappa = 0.5;
};
/// x = (1, s, ..., s^degree)
struct Polynomial {
  int degree = 1;
};
/// Arbitrary regressor columns evaluated at each grid value.
struct Custom {
  std::vector<std::function<double(double)>> columns;
};
}  // namespace transform

using Transform = std::variant<transform::Exponential, transform::Rational,
                               transform::Polynomial, transform::Custom>;

/// Grid s_i = i / count, i = 1..count, pushed through a regressor family.
struct GridSpec {
  std::size_t count = 20;
  Transform transform = transform::Exponential{};
};

DesignSpace build_from_grid(const GridSpec& spec);

DesignSpace build_x1();
/// Throws BadParameter unless kappa > 0.
DesignSpace build_x2(double kappa = 0.5);
DesignSpace build_x3();

/// Rows (1, s, ..., s^degree) for each grid value.  Throws RankDeficient with
/// fewer than degree + 1 distinct grid values.
DesignSpace build_polynomial(int degree, std::span<const double> grid);

/// `count` equally spaced points on [-1, 1].
std::vector<double> symmetric_grid(std::size_t count);

/// One candidate per row, comma separated, optional header.  Throws
/// ParseError, ShapeError or RankDeficient.
DesignSpace load_design_csv(std::istream& in);
DesignSpace load_design_csv_file(const std::string& path);

/// Writes a header (x1..xm) and rows at 17 significant digits.
void write_design_csv(std::ostream& out, const DesignSpace& x);

/// Formats a double with 17 significant digits.
std::string format_real(double v);

}  // namespace dopt
