#include "dopt/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace dopt {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

std::string grid_label(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "s=%.6g", s);
  return buf;
}

std::vector<double> row_for(const Transform& t, double s) {
  return std::visit(
      overloaded{
          [s](const transform::Exponential&) {
            const double e = std::exp(-s);
            return std::vector<double>{1.0, e, s * e};
          },
          [s](const transform::Rational& r) {
            const double k = r.kappa + s;
            return std::vector<double>{1.0, s / k, s / (k * k)};
          },
          [s](const transform::Polynomial& p) {
            std::vector<double> row(static_cast<std::size_t>(p.degree) + 1);
            double v = 1.0;
            for (auto& e : row) {
              e = v;
              v *= s;
            }
            return row;
          },
          [s](const transform::Custom& c) {
            std::vector<double> row;
            row.reserve(c.columns.size());
            for (const auto& f : c.columns) row.push_back(f(s));
            return row;
          },
      },
      t);
}

std::string_view trim(std::string_view v) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!v.empty() && !not_space(v.front())) v.remove_prefix(1);
  while (!v.empty() && !not_space(v.back())) v.remove_suffix(1);
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_real(std::string_view field, double& value) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc{} && ptr == end && std::isfinite(value);
}

}  // namespace

DesignSpace build_from_grid(const GridSpec& spec) {
  if (spec.count < 2) throw Error(ErrorCode::BadParameter, "grid needs at least two points");
  if (const auto* r = std::get_if<transform::Rational>(&spec.transform); r && !(r->kappa > 0.0))
    throw Error(ErrorCode::BadParameter, "kappa must be positive");
  if (const auto* p = std::get_if<transform::Polynomial>(&spec.transform); p && p->degree < 1)
    throw Error(ErrorCode::BadParameter, "polynomial degree must be at least 1");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= spec.count; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(spec.count);
    rows.push_back(row_for(spec.transform, s));
    labels.push_back(grid_label(s));
  }
  const std::size_t m = rows.front().size();
  if (m == 0) throw Error(ErrorCode::BadParameter, "regressor family has no columns");
  Matrix pts(rows.size(), m);
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), pts.row(i).begin());
  return DesignSpace(std::move(pts), std::move(labels));
}

DesignSpace build_x1() { return build_from_grid({20, transform::Exponential{}}); }

DesignSpace build_x2(double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::BadParameter, "kappa must be positive");
  return build_from_grid({20, transform::Rational{kappa}});
}

DesignSpace build_x3() { return build_from_grid({20, transform::Polynomial{3}}); }

DesignSpace build_polynomial(int degree, std::span<const double> grid) {
  if (degree < 1) throw Error(ErrorCode::BadParameter, "polynomial degree must be at least 1");
  const std::set<double> distinct(grid.begin(), grid.end());
  if (distinct.size() < static_cast<std::size_t>(degree) + 1) {
    throw Error(ErrorCode::RankDeficient, "a degree-" + std::to_string(degree) +
                                              " polynomial needs at least " +
                                              std::to_string(degree + 1) + " distinct grid points");
  }
  Matrix pts(grid.size(), static_cast<std::size_t>(degree) + 1);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto row = row_for(transform::Polynomial{degree}, grid[i]);
    std::copy(row.begin(), row.end(), pts.row(i).begin());
    labels.push_back(grid_label(grid[i]));
  }
  return DesignSpace(std::move(pts), std::move(labels));
}

std::vector<double> symmetric_grid(std::size_t count) {
  if (count < 2) throw Error(ErrorCode::BadParameter, "grid needs at least two points");
  std::vector<double> g(count);
  const double span = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = -1.0 + 2.0 * static_cast<double>(i) / span;
  return g;
}

DesignSpace load_design_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto f : fields) {
      double v = 0.0;
      if (!parse_real(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_content) {  // header row
        first_content = false;
        continue;
      }
      throw Error(ErrorCode::ParseError, "non-numeric field on line " + std::to_string(line_no));
    }
    first_content = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::ShapeError, "ragged row on line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "no numeric rows in design file");
  const std::size_t m = rows.front().size();
  if (rows.size() < m || m < 2)
    throw Error(ErrorCode::ShapeError, "design file needs n >= m >= 2 (got n=" +
                                           std::to_string(rows.size()) + ", m=" + std::to_string(m) + ")");
  Matrix pts(rows.size(), m);
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), pts.row(i).begin());
  return DesignSpace(std::move(pts));
}

DesignSpace load_design_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open design file '" + path + "'");
  return load_design_csv(in);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_design_csv(std::ostream& out, const DesignSpace& x) {
  for (std::size_t j = 0; j < x.m(); ++j) out << (j ? "," : "") << 'x' << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < x.m(); ++j) out << (j ? "," : "") << format_real(x.point(i)[j]);
    out << '\n';
  }
}

}  // namespace dopt
