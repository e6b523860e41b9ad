// dopt: D-optimal designs by multiplicative algorithms.
//
//   dopt solve  --design x1 --variant alg1
//   dopt rate   --design poly:1 --alphas 0,0.5,1
//   dopt table1 --out text

#include <iostream>

#include "CLI11.hpp"

#include "dopt/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"D-optimal approximate designs via multiplicative algorithms"};
  app.require_subcommand(1);

  dopt::SolveArgs solve_args;
  std::string trace_path;
  auto* solve = app.add_subcommand("solve", "Compute D-optimal weights on a design space");
  solve->add_option("--design", solve_args.design, "x1 | x2[:kappa] | x3 | poly:<deg>[:<count>] | csv:<path>")
      ->capture_default_str();
  solve->add_option("--variant", solve_args.variant, "alg1 | alg2 | alpha:<v> | dynamic")->capture_default_str();
  solve->add_option("--gap-tol", solve_args.gap_tolerance, "Stop when max_i d_i - m falls to this")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", solve_args.max_iterations, "Iteration cap")->capture_default_str();
  solve->add_option("--start", solve_args.start, "uniform | csv:<path>")->capture_default_str();
  solve->add_option("--trace", trace_path, "Write the iteration history as CSV");
  solve->add_option("--out", solve_args.out, "json | csv")->capture_default_str();
  solve->add_flag("--empirical-rate", solve_args.empirical_rate, "Estimate the limiting step-norm ratio");

  dopt::RateArgs rate_args;
  std::string weights_path;
  auto* rate = app.add_subcommand("rate", "Rate matrix spectrum and global rate at the optimum");
  rate->add_option("--design", rate_args.design, "Design space (as for solve)")->capture_default_str();
  rate->add_option("--alphas", rate_args.alphas, "Comma separated alpha values")->delimiter(',');
  rate->add_option("--weights", weights_path, "Optimal weights CSV (otherwise solved first)");
  rate->add_flag("--restrict-support", rate_args.restrict_support,
                 "Analyse the design restricted to its support (approximate)");
  rate->add_option("--support-threshold", rate_args.support_threshold, "Minimum weight of a support point")
      ->capture_default_str();

  dopt::Table1Args table_args;
  auto* table = app.add_subcommand("table1", "Empirical convergence speeds for alpha in {0, 0.5, 1, dynamic}");
  table->add_option("--designs", table_args.designs, "Subset of design spaces")->delimiter(',');
  table->add_option("--out", table_args.out, "text | json | csv")->capture_default_str();
  table->add_option("--gap-tol", table_args.gap_tolerance, "Solver gap tolerance")->capture_default_str();
  table->add_option("--anchor-gap", table_args.anchor_relative_gap,
                    "Relative gap at which the step ratio is read")
      ->capture_default_str();
  table->add_flag("--restrict-support", table_args.restrict_support,
                  "Add restricted-support theoretical speeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dopt::kExitError;
  }

  if (*solve) {
    if (!trace_path.empty()) solve_args.trace_path = trace_path;
    return dopt::cmd_solve(solve_args, std::cout, std::cerr);
  }
  if (*rate) {
    if (!weights_path.empty()) rate_args.weights_path = weights_path;
    return dopt::cmd_rate(rate_args, std::cout, std::cerr);
  }
  return dopt::cmd_table1(table_args, std::cout, std::cerr);
}
