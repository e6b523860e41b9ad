#include "dopt/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "dopt/models.hpp"

namespace dopt {

using nlohmann::json;

namespace {

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadParameter, "invalid " + what + " '" + text + "'");
  }
}

int parse_count(const std::string& text, const std::string& what) {
  const double v = parse_number(text, what);
  if (v != std::floor(v) || v < 0 || v > 1e6) throw Error(ErrorCode::BadParameter, "invalid " + what + " '" + text + "'");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

json rate_json(const std::optional<EmpiricalRate>& r, RateAnchor anchor) {
  if (!r) return nullptr;
  json j;
  j["anchor"] = anchor == RateAnchor::plateau ? "plateau" : "relative_gap";
  j["stable"] = r->stable;
  j["rate"] = r->stable ? json(r->rate) : json(nullptr);
  j["speed"] = r->stable ? json(1.0 - r->rate) : json(nullptr);
  j["read_at_step"] = r->iteration;
  j["spread"] = r->spread;
  j["note"] = r->note;
  return j;
}

void emit_error(const Error& e, std::ostream& out, std::ostream& err, bool as_json) {
  err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
  if (as_json) {
    json j;
    j["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
    out << j.dump(2) << '\n';
  }
}

double optional_or_nan(const std::optional<double>& v) { return v ? *v : std::nan(""); }

}  // namespace

DesignSpace parse_design_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw Error(ErrorCode::BadParameter, "empty design spec");
  const std::string& kind = parts[0];
  if (kind == "x1" && parts.size() == 1) return build_x1();
  if (kind == "x3" && parts.size() == 1) return build_x3();
  if (kind == "x2" && parts.size() <= 2)
    return build_x2(parts.size() == 2 ? parse_number(parts[1], "kappa") : 0.5);
  if (kind == "poly" && (parts.size() == 2 || parts.size() == 3)) {
    const int degree = parse_count(parts[1], "polynomial degree");
    const int count = parts.size() == 3 ? parse_count(parts[2], "grid size") : degree + 1;
    if (degree < 1) throw Error(ErrorCode::BadParameter, "polynomial degree must be at least 1");
    return build_polynomial(degree, symmetric_grid(static_cast<std::size_t>(count)));
  }
  if (kind == "csv" && spec.size() > 4) return load_design_csv_file(spec.substr(4));
  throw Error(ErrorCode::BadParameter,
              "unknown design '" + spec + "' (expected x1, x2[:kappa], x3, poly:<deg>[:<count>], csv:<path>)");
}

SolverConfig parse_variant_spec(const std::string& spec) {
  if (spec == "alg1") return SolverConfig::with_variant(Variant::algorithm_I);
  if (spec == "alg2") return SolverConfig::with_variant(Variant::algorithm_II_centered);
  if (spec == "dynamic") return SolverConfig::with_variant(Variant::dynamic_alpha);
  if (spec.rfind("alpha:", 0) == 0) return SolverConfig::fixed(parse_number(spec.substr(6), "alpha"));
  throw Error(ErrorCode::BadParameter, "unknown variant '" + spec + "' (expected alg1, alg2, alpha:<v>, dynamic)");
}

WeightVector load_weights_csv_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open weights file '" + path + "'");
  std::vector<double> w;
  std::string line;
  std::size_t line_no = 0;
  bool seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split(line, ',');
    if (fields.empty() || fields.size() > 2)
      throw Error(ErrorCode::ShapeError, "weights file rows need 1 or 2 fields (line " + std::to_string(line_no) + ")");
    try {
      w.push_back(parse_number(fields.back(), "weight"));
    } catch (const Error&) {
      if (seen) throw Error(ErrorCode::ParseError, "non-numeric weight on line " + std::to_string(line_no));
    }
    seen = true;
  }
  if (w.size() != n)
    throw Error(ErrorCode::ShapeError, "weights file has " + std::to_string(w.size()) + " entries, design has " +
                                           std::to_string(n));
  return WeightVector(std::move(w));
}

std::string to_json(const RunReport& r) {
  json j;
  j["design"] = r.design_id;
  j["n"] = r.n;
  j["m"] = r.m;
  j["config"] = {
      {"variant", variant_name(r.config.variant)},
      {"alpha", r.config.variant == Variant::fixed_alpha ? json(r.config.alpha) : json(nullptr)},
      {"gap_tolerance", r.config.gap_tolerance},
      {"step_tolerance", r.config.step_tolerance},
      {"max_iterations", r.config.max_iterations},
      {"start", r.start},
  };
  json weights = json::array();
  for (std::size_t i = 0; i < r.weights.size(); ++i)
    weights.push_back({{"label", r.labels[i]}, {"weight", r.weights[i]}});
  j["weights"] = std::move(weights);
  j["logdet"] = r.logdet;
  j["equivalence_gap"] = r.equivalence_gap;
  j["iterations"] = r.iterations;
  j["termination"] = termination_name(r.termination);
  j["empirical_rate"] = rate_json(r.empirical_rate, RateAnchor::plateau);
  j["wall_time_seconds"] = r.wall_time_seconds;
  return j.dump(2);
}

std::string to_csv(const RunReport& r) {
  std::ostringstream o;
  o << "key,value\n";
  o << "design," << r.design_id << '\n';
  o << "n," << r.n << '\n' << "m," << r.m << '\n';
  o << "variant," << variant_name(r.config.variant) << '\n';
  o << "alpha," << (r.config.variant == Variant::fixed_alpha ? format_real(r.config.alpha) : "") << '\n';
  o << "gap_tolerance," << format_real(r.config.gap_tolerance) << '\n';
  o << "step_tolerance," << format_real(r.config.step_tolerance) << '\n';
  o << "max_iterations," << r.config.max_iterations << '\n';
  o << "start," << r.start << '\n';
  o << "logdet," << format_real(r.logdet) << '\n';
  o << "equivalence_gap," << format_real(r.equivalence_gap) << '\n';
  o << "iterations," << r.iterations << '\n';
  o << "termination," << termination_name(r.termination) << '\n';
  o << "empirical_rate,";
  if (r.empirical_rate && r.empirical_rate->stable) o << format_real(r.empirical_rate->rate);
  o << '\n';
  o << "wall_time_seconds," << format_real(r.wall_time_seconds) << '\n';
  for (std::size_t i = 0; i < r.weights.size(); ++i)
    o << "weight[" << r.labels[i] << "]," << format_real(r.weights[i]) << '\n';
  return o.str();
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  const bool with_w = !trace.iterates.empty();
  out << "iteration,logdet,gap,alpha,step_norm,gain";
  if (with_w)
    for (std::size_t i = 0; i < trace.iterates.front().size(); ++i) out << ",w" << i + 1;
  out << '\n';
  for (std::size_t t = 0; t < trace.logdets.size(); ++t) {
    out << t << ',' << format_real(trace.logdets[t]) << ',' << format_real(trace.gaps[t]) << ',';
    if (t > 0) {
      out << format_real(trace.alphas[t - 1]) << ',' << format_real(trace.step_norms[t - 1]) << ',';
      if (t - 1 < trace.gains.size()) out << format_real(trace.gains[t - 1]);
    } else {
      out << ",,";
    }
    if (with_w)
      for (double v : trace.iterates[t].values()) out << ',' << format_real(v);
    out << '\n';
  }
}

int exit_status_for(Termination t) noexcept {
  switch (t) {
    case Termination::gap_met:
    case Termination::step_met: return kExitOk;
    case Termination::max_iters:
    case Termination::oscillation_detected: return kExitNonConvergence;
    case Termination::singular: return kExitError;
  }
  return kExitError;
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  const bool as_json = args.out == "json";
  try {
    if (args.out != "json" && args.out != "csv")
      throw Error(ErrorCode::BadParameter, "--out must be json or csv");
    const DesignSpace x = parse_design_spec(args.design);
    SolverConfig config = parse_variant_spec(args.variant);
    config.gap_tolerance = args.gap_tolerance;
    config.max_iterations = args.max_iterations;
    config.record_trace = args.trace_path.has_value();

    WeightVector w0 = WeightVector::uniform(x.n());
    if (args.start.rfind("csv:", 0) == 0) {
      w0 = load_weights_csv_file(args.start.substr(4), x.n());
    } else if (args.start != "uniform") {
      throw Error(ErrorCode::BadParameter, "--start must be uniform or csv:<path>");
    }

    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult result = solve(x, w0, config);
    const auto t1 = std::chrono::steady_clock::now();

    RunReport report;
    report.design_id = args.design;
    report.n = x.n();
    report.m = x.m();
    report.config = config;
    report.start = args.start;
    report.labels = x.labels();
    report.weights.assign(result.weights.values().begin(), result.weights.values().end());
    report.logdet = result.trace.logdets.back();
    report.equivalence_gap = result.trace.gaps.back();
    report.iterations = result.trace.iterations();
    report.termination = result.trace.termination;
    if (args.empirical_rate) report.empirical_rate = empirical_rate(result.trace);
    report.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();

    if (args.trace_path) {
      std::ofstream tf(*args.trace_path);
      if (!tf) throw Error(ErrorCode::IoError, "cannot write trace file '" + *args.trace_path + "'");
      write_trace_csv(tf, result.trace);
    }
    out << (as_json ? to_json(report) : to_csv(report));
    if (as_json) out << '\n';
    const int status = exit_status_for(report.termination);
    if (status != kExitOk) err << "solver stopped: " << termination_name(report.termination) << '\n';
    return status;
  } catch (const Error& e) {
    emit_error(e, out, err, as_json);
    return kExitError;
  }
}

int cmd_rate(const RateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.alphas.empty()) throw Error(ErrorCode::BadParameter, "--alphas needs at least one value");
    const DesignSpace full = parse_design_spec(args.design);
    for (double a : args.alphas) {
      if (!(a >= 0.0) || !(a < static_cast<double>(full.m())))
        throw Error(ErrorCode::BadParameter, "alpha " + format_real(a) + " outside [0, m) for m = " +
                                                 std::to_string(full.m()));
    }

    WeightVector w = WeightVector::uniform(full.n());
    bool solved = false;
    if (args.weights_path) {
      w = load_weights_csv_file(*args.weights_path, full.n());
    } else {
      SolverConfig config;
      config.gap_tolerance = args.gap_tolerance;
      w = solve(full, w, config).weights;
      solved = true;
    }

    std::optional<SupportRestriction> restriction;
    if (args.restrict_support) restriction = restrict_to_support(full, w, args.support_threshold);
    const DesignSpace& x = restriction ? restriction->design : full;
    const WeightVector& wstar = restriction ? restriction->weights : w;

    std::vector<RateReport> reports;
    try {
      reports = rate_summary(x, wstar, args.alphas);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotInteriorOptimum && !args.restrict_support) {
        throw Error(ErrorCode::NotInteriorOptimum,
                    std::string(e.what()) + "; rerun with --restrict-support for the approximate analysis");
      }
      throw;
    }

    json j;
    j["design"] = args.design;
    j["n"] = full.n();
    j["m"] = full.m();
    j["weights_source"] = solved ? "solved" : "file";
    j["restricted_to_support"] = args.restrict_support;
    j["approximate"] = args.restrict_support;
    json support = json::array();
    for (std::size_t i = 0; i < x.n(); ++i) support.push_back({{"label", x.labels()[i]}, {"weight", wstar[i]}});
    j["support"] = std::move(support);
    const double md = static_cast<double>(x.m());
    json reps = json::array();
    for (const auto& r : reports) {
      json rj;
      rj["alpha"] = r.alpha;
      rj["gamma_eigenvalues"] = r.gamma_eigenvalues;
      rj["global_rate"] = r.global_rate;
      rj["global_speed"] = 1.0 - r.global_rate;
      const double lo = -r.alpha / (md - r.alpha);
      rj["eigenvalue_interval"] = {lo, 1.0};
      bool inside = true;
      for (double v : r.gamma_eigenvalues) inside = inside && v >= lo - 1e-8 && v <= 1.0 + 1e-8;
      rj["within_interval"] = inside;
      rj["predicted_speed_ratio"] = r.predicted_speed_ratio;
      rj["rate_relation_applicable"] = r.rate_relation_applicable;
      rj["predicted_rate"] = r.predicted_rate ? json(*r.predicted_rate) : json(nullptr);
      rj["speed_identity_residual"] = r.speed_identity_residual;
      rj["speed_identity_holds"] = r.speed_identity_holds;
      rj["similarity_residual"] = r.similarity_residual ? json(*r.similarity_residual) : json(nullptr);
      reps.push_back(std::move(rj));
    }
    j["reports"] = std::move(reps);
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    emit_error(e, out, err, true);
    return kExitError;
  }
}

std::vector<Table1Row> table1(const Table1Args& args) {
  struct Column {
    const char* name;
    SolverConfig config;
  };
  const std::vector<Column> columns = {
      {"alpha=0", SolverConfig::fixed(0.0)},
      {"alpha=0.5", SolverConfig::fixed(0.5)},
      {"alpha=1", SolverConfig::fixed(1.0)},
      {"dynamic", SolverConfig::with_variant(Variant::dynamic_alpha)},
  };
  EmpiricalRateOptions rate_options;
  rate_options.anchor = RateAnchor::relative_gap;
  rate_options.relative_gap = args.anchor_relative_gap;

  std::vector<DesignSpace> designs;
  for (const auto& d : args.designs) designs.push_back(parse_design_spec(d));

  std::vector<std::vector<std::future<SolveResult>>> runs(designs.size());
  for (std::size_t k = 0; k < designs.size(); ++k) {
    for (const auto& col : columns) {
      SolverConfig config = col.config;
      config.gap_tolerance = args.gap_tolerance;
      config.max_iterations = args.max_iterations;
      config.exact_gains = false;
      runs[k].push_back(std::async(std::launch::async, [&x = designs[k], config] {
        return solve(x, WeightVector::uniform(x.n()), config);
      }));
    }
  }

  std::vector<Table1Row> rows;
  for (std::size_t k = 0; k < designs.size(); ++k) {
    const DesignSpace& x = designs[k];
    Table1Row row;
    row.design = args.designs[k];
    row.m = x.m();
    std::optional<WeightVector> optimum;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      SolveResult res = runs[k][c].get();
      Table1Cell cell;
      cell.column = columns[c].name;
      cell.rate = empirical_rate(res.trace, rate_options);
      cell.iterations = res.trace.iterations();
      cell.termination = res.trace.termination;
      cell.alpha = res.trace.alphas.empty() ? columns[c].config.alpha : res.trace.alphas.back();
      if (columns[c].config.variant == Variant::dynamic_alpha) row.alpha_hat = cell.alpha;
      if (c == 0) optimum = res.weights;
      row.cells.push_back(std::move(cell));
    }
    if (optimum) row.support = optimum->support(kSupportThreshold);

    if (args.restrict_support && optimum) {
      try {
        const auto sub = restrict_to_support(x, *optimum);
        std::vector<double> alphas;
        for (const auto& cell : row.cells) alphas.push_back(cell.alpha);
        const auto reports = rate_summary(sub.design, sub.weights, alphas);
        for (std::size_t c = 0; c < reports.size(); ++c) row.cells[c].theory_rate = reports[c].global_rate;
      } catch (const Error&) {
        // Leave the theory column empty when the support is not an interior optimum.
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_table1(const Table1Args& args, std::ostream& out, std::ostream& err) {
  const bool as_json = args.out == "json";
  try {
    if (args.out != "json" && args.out != "csv" && args.out != "text")
      throw Error(ErrorCode::BadParameter, "--out must be text, json or csv");
    const auto rows = table1(args);

    if (as_json) {
      json j;
      j["gap_tolerance"] = args.gap_tolerance;
      j["anchor_relative_gap"] = args.anchor_relative_gap;
      json jr = json::array();
      for (const auto& row : rows) {
        json r;
        r["design"] = row.design;
        r["m"] = row.m;
        r["alpha_hat"] = row.alpha_hat;
        json support = json::array();
        for (auto i : row.support) support.push_back(i + 1);
        r["support"] = std::move(support);
        const double md = static_cast<double>(row.m);
        const auto& base = row.cells.front().rate;
        json cells = json::array();
        for (const auto& cell : row.cells) {
          json c;
          c["column"] = cell.column;
          c["alpha"] = cell.alpha;
          c["stable"] = cell.rate.stable;
          c["speed"] = cell.rate.stable ? json(1.0 - cell.rate.rate) : json(nullptr);
          c["read_at_step"] = cell.rate.iteration;
          c["note"] = cell.rate.note;
          c["iterations"] = cell.iterations;
          c["termination"] = termination_name(cell.termination);
          c["predicted_ratio"] = md / (md - cell.alpha);
          c["observed_ratio"] = (cell.rate.stable && base.stable)
                                    ? json((1.0 - cell.rate.rate) / (1.0 - base.rate))
                                    : json(nullptr);
          c["theory_speed"] = cell.theory_rate ? json(1.0 - *cell.theory_rate) : json(nullptr);
          cells.push_back(std::move(c));
        }
        r["cells"] = std::move(cells);
        jr.push_back(std::move(r));
      }
      j["rows"] = std::move(jr);
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (args.out == "csv") {
      out << "design,m,column,alpha,speed,stable,iterations,termination,theory_speed\n";
      for (const auto& row : rows)
        for (const auto& cell : row.cells) {
          out << row.design << ',' << row.m << ',' << cell.column << ',' << format_real(cell.alpha) << ','
              << (cell.rate.stable ? format_real(1.0 - cell.rate.rate) : "") << ','
              << (cell.rate.stable ? "true" : "false") << ',' << cell.iterations << ','
              << termination_name(cell.termination) << ','
              << (cell.theory_rate ? format_real(1.0 - *cell.theory_rate) : "") << '\n';
        }
      return kExitOk;
    }

    out << "Empirical speed 1 - r_hat (ratio read at relative gap " << args.anchor_relative_gap << ")\n\n";
    out << std::left << std::setw(10) << "design" << std::right;
    for (const char* h : {"alpha=0", "alpha=0.5", "alpha=1", "dynamic", "alpha_hat"}) out << std::setw(11) << h;
    out << '\n';
    for (const auto& row : rows) {
      out << std::left << std::setw(10) << row.design << std::right << std::fixed << std::setprecision(4);
      for (const auto& cell : row.cells) {
        if (cell.rate.stable)
          out << std::setw(11) << 1.0 - cell.rate.rate;
        else
          out << std::setw(11) << "unstable";
      }
      out << std::setw(11) << std::setprecision(3) << row.alpha_hat << '\n';
      out.unsetf(std::ios::floatfield);
    }
    out << "\nSpeed ratio (1 - r_hat(alpha)) / (1 - r_hat(0)) vs m / (m - alpha)\n";
    for (const auto& row : rows) {
      const auto& base = row.cells.front().rate;
      const double md = static_cast<double>(row.m);
      out << std::left << std::setw(10) << row.design << std::right << std::fixed << std::setprecision(3);
      for (std::size_t c = 1; c < row.cells.size(); ++c) {
        const auto& cell = row.cells[c];
        const double observed =
            (cell.rate.stable && base.stable) ? (1.0 - cell.rate.rate) / (1.0 - base.rate) : std::nan("");
        out << "  " << cell.column << ": " << observed << " vs " << md / (md - cell.alpha);
      }
      out << '\n';
      out.unsetf(std::ios::floatfield);
    }
    if (args.restrict_support) {
      out << "\nRestricted-support theory speed 1 - r(alpha) (approximate)\n";
      for (const auto& row : rows) {
        out << std::left << std::setw(10) << row.design << std::right << std::fixed << std::setprecision(4);
        for (const auto& cell : row.cells) out << std::setw(11) << 1.0 - optional_or_nan(cell.theory_rate);
        out << '\n';
        out.unsetf(std::ios::floatfield);
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    emit_error(e, out, err, as_json);
    return kExitError;
  }
}

}  // namespace dopt
