#pragma once

// Command implementations behind the `dopt` CLI, kept free of argument
// parsing so they can be driven directly from tests.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dopt/design.hpp"
#include "dopt/rate.hpp"
#include "dopt/solvers.hpp"

namespace dopt {

enum ExitStatus : int { kExitOk = 0, kExitError = 1, kExitNonConvergence = 2 };

/// x1 | x2 | x2:<kappa> | x3 | poly:<deg> | poly:<deg>:<count> | csv:<path>
DesignSpace parse_design_spec(const std::string& spec);

/// alg1 | alg2 | alpha:<v> | dynamic
SolverConfig parse_variant_spec(const std::string& spec);

/// One weight per row (optionally "label,weight"), optional header.
WeightVector load_weights_csv_file(const std::string& path, std::size_t n);

struct RunReport {
  std::string design_id;
  std::size_t n = 0;
  std::size_t m = 0;
  SolverConfig config;
  std::string start;
  std::vector<std::string> labels;
  std::vector<double> weights;
  double logdet = 0.0;
  double equivalence_gap = 0.0;
  std::size_t iterations = 0;
  Termination termination = Termination::max_iters;
  std::optional<EmpiricalRate> empirical_rate;
  double wall_time_seconds = 0.0;
};

std::string to_json(const RunReport& report);
std::string to_csv(const RunReport& report);

/// Writes one row per iterate: iteration, logdet, gap, alpha, step_norm,
/// gain and, when the iterates were recorded, w1..wn.
void write_trace_csv(std::ostream& out, const SolveTrace& trace);

int exit_status_for(Termination t) noexcept;

struct SolveArgs {
  std::string design = "x1";
  std::string variant = "alg1";
  double gap_tolerance = 1e-6;
  std::size_t max_iterations = 500000;
  std::string start = "uniform";
  std::optional<std::string> trace_path;
  std::string out = "json";
  bool empirical_rate = false;
};

struct RateArgs {
  std::string design = "x1";
  std::vector<double> alphas = {0.0};
  std::optional<std::string> weights_path;
  bool restrict_support = false;
  double support_threshold = kSupportThreshold;
  double gap_tolerance = 1e-11;
};

struct Table1Args {
  std::vector<std::string> designs = {"x1", "x2", "x3"};
  std::string out = "text";
  double gap_tolerance = 1e-9;
  double anchor_relative_gap = 1e-4;
  std::size_t max_iterations = 500000;
  bool restrict_support = false;
};

/// Column of the comparison table: three fixed alphas and the dynamic rule.
struct Table1Cell {
  std::string column;  // "alpha=0", "alpha=0.5", "alpha=1", "dynamic"
  double alpha = 0.0;  // fixed alpha, or the final dynamic alpha
  EmpiricalRate rate;
  std::size_t iterations = 0;
  Termination termination = Termination::max_iters;
  std::optional<double> theory_rate;  // restricted-support global rate
};

struct Table1Row {
  std::string design;
  std::size_t m = 0;
  std::vector<Table1Cell> cells;
  double alpha_hat = 0.0;
  std::vector<std::size_t> support;  // indices of the converged support
};

std::vector<Table1Row> table1(const Table1Args& args);

/// Each command writes its report to `out`, diagnostics to `err`, and
/// returns the process exit status.
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_rate(const RateArgs& args, std::ostream& out, std::ostream& err);
int cmd_table1(const Table1Args& args, std::ostream& out, std::ostream& err);

}  // namespace dopt
