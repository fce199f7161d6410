// Command-line front end: solve problem files and audit recorded traces.

#include <CLI11.hpp>
#include <iostream>

#include "alcc/cli_driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"alcc: inexact augmented Lagrangian solver for conic convex programs"};
  app.require_subcommand(1);

  alcc::cli::SolveArgs args;
  auto* solve_cmd = app.add_subcommand("solve", "solve a problem file");
  solve_cmd->add_option("problem", args.problem_path, "problem JSON file")->required();
  solve_cmd->add_option("--beta", args.sched.beta, "penalty growth factor (> 1)");
  solve_cmd->add_option("--c", args.sched.c, "schedule decay exponent offset (> 0)");
  solve_cmd->add_option("--alpha0", args.sched.alpha0, "initial function-gap tolerance");
  solve_cmd->add_option("--eta0", args.sched.eta0, "initial subgradient tolerance");
  solve_cmd->add_option("--mu0", args.sched.mu0, "initial penalty parameter");
  solve_cmd->add_option("--eps", args.sched.target_eps, "target KKT residual");
  solve_cmd->add_option("--max-outer", args.sched.max_outer, "outer iteration limit");
  solve_cmd->add_option("--trace", args.trace_csv, "write the iterate trace as CSV");
  solve_cmd->add_option("--json", args.trace_json, "write the full-precision trace as JSON");
  solve_cmd->add_option("--seed", args.sched.seed, "seed for all randomized pieces");

  std::string trace_path, problem_path;
  auto* check_cmd = app.add_subcommand("check-bounds", "audit per-iterate bounds in a trace");
  check_cmd->add_option("--trace", trace_path, "JSON trace written by solve --json")->required();
  check_cmd->add_option("--problem", problem_path, "problem file the trace came from")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return alcc::cli::run_solve(args, std::cout, std::cerr);
    return alcc::cli::run_check_bounds(trace_path, problem_path, std::cout, std::cerr);
  } catch (const alcc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
