#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

#include "alcc/problem_io.hpp"

namespace alcc::cli {

// exit codes for `solve`
inline constexpr int kExitConverged = 0;
inline constexpr int kExitUsage = 1;  // schema violation / bad file
inline constexpr int kExitMaxOuter = 2;
inline constexpr int kExitNumericFailure = 3;

struct SolveArgs {
  std::string problem_path;
  ScheduleConfig sched;
  std::string trace_csv;   // optional
  std::string trace_json;  // optional
};

inline bool log_enabled() {
  const char* v = std::getenv("ALCC_LOG");
  return v != nullptr && v[0] != '\0' && std::string(v) != "0";
}

inline int run_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  io::ParsedProblem parsed{ConicProgram{SimpleSetProx::simplex(1), SmoothPart::zero(),
                                        LinearMap::identity(0), {}, Cone::zero(0)},
                           std::nullopt, std::nullopt};
  std::string hash;
  try {
    parsed = io::load_problem(args.problem_path);
    hash = io::hash_file(args.problem_path);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  SolveOptions opts;
  opts.x0 = parsed.x0;
  opts.reference = parsed.reference;
  if (log_enabled()) {
    opts.observer = [&err](const OuterIterate& it) {
      err << "[alcc] k=" << it.k << " mu=" << it.mu << " inner=" << it.inner_iters
          << " infeas=" << it.infeas << " obj=" << it.obj << " |y|=" << norm2(it.y) << "\n";
    };
  }

  SolveTrace trace = solve(parsed.prog, args.sched, opts);

  if (!args.trace_csv.empty()) io::write_file_atomic(args.trace_csv, io::trace_to_csv(trace));
  if (!args.trace_json.empty())
    io::write_file_atomic(args.trace_json, io::trace_to_json(trace, args.sched, hash).dump(2) + "\n");

  out << "status: " << io::status_name(trace.status) << "\n";
  if (!trace.iterates.empty()) {
    const auto& last = trace.iterates.back();
    out << "outer iterations: " << trace.iterates.size() << "\n";
    out << "objective: " << io::format_full(last.obj) << "\n";
    out << "infeasibility: " << io::format_full(last.infeas) << "\n";
    const auto& cert = trace.final_kkt;
    out << "kkt residuals: infeas=" << cert.primal_infeas << " dual=" << cert.dual_membership
        << " compl=" << cert.complementarity << " stat=" << cert.stationarity << "\n";
  }
  if (trace.status == SolveStatus::NumericFailure) {
    err << "error: " << trace.failure_message << "\n";
    return kExitNumericFailure;
  }
  return trace.status == SolveStatus::Converged ? kExitConverged : kExitMaxOuter;
}

/// Audit the computable per-iterate bounds recorded in a JSON trace against
/// its problem file. Recomputes infeasibility and objective from the stored
/// iterates, so a corrupted column fails the audit.
inline int run_check_bounds(const std::string& trace_path, const std::string& problem_path,
                            std::ostream& out, std::ostream& err) {
  io::json trace_doc;
  try {
    std::ifstream in(trace_path);
    if (!in) throw ParseError("cannot open trace file: " + trace_path);
    trace_doc = io::json::parse(in);
  } catch (const std::exception& e) {
    err << "error: trace file: " << e.what() << "\n";
    return 1;
  }

  io::ParsedProblem parsed{ConicProgram{SimpleSetProx::simplex(1), SmoothPart::zero(),
                                        LinearMap::identity(0), {}, Cone::zero(0)},
                           std::nullopt, std::nullopt};
  try {
    parsed = io::load_problem(problem_path);
    if (trace_doc.value("format", "") != io::kTraceFormatTag)
      throw ParseError("trace format tag mismatch (want " + std::string(io::kTraceFormatTag) + ")");
    if (trace_doc.value("problem_hash", "") != io::hash_file(problem_path))
      throw ParseError("trace/problem mismatch: problem hash differs");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const ConicProgram& prog = parsed.prog;
  const Reference* ref = parsed.reference ? &*parsed.reference : nullptr;
  bool all_pass = true;
  for (const auto& row : trace_doc.at("iterates")) {
    const std::size_t k = row.at("k").get<std::size_t>();
    const double mu = row.at("mu").get<double>();
    const double xi = row.at("xi").get<double>();
    Vector x = io::detail::parse_vector(row.at("x"), "trace.x");
    Vector y = io::detail::parse_vector(row.at("y"), "trace.y");
    Vector y_next = io::detail::parse_vector(row.at("y_next"), "trace.y_next");
    const double stored_infeas = row.at("infeas").get<double>();
    const double stored_obj = row.at("obj").get<double>();

    const double infeas = prog.infeasibility(x);
    const double obj = prog.objective(x);
    const double y_norm = norm2(y);

    bool row_consistent = std::abs(infeas - stored_infeas) <= 1e-9 * (1.0 + infeas) &&
                          std::abs(obj - stored_obj) <= 1e-9 * (1.0 + std::abs(obj));
    bool thm7 = infeas <= (y_norm + norm2(sub(y_next, y))) / mu + 1e-9 * (1.0 + y_norm) / mu;
    bool thm6 = true, thm5 = true;
    if (ref && ref->p_star) {
      thm6 = obj - *ref->p_star <= xi + y_norm * y_norm / (2.0 * mu) + 1e-8;
      if (ref->y_star) {
        Vector v = sub(sub(prog.a_map.apply(x), prog.b), scaled(y, 1.0 / mu));
        const double lower =
            -norm2(*ref->y_star) * prog.cone.distance(v) + dot(y, *ref->y_star) / mu;
        thm5 = obj - *ref->p_star >= lower - 1e-8;
      }
    }

    auto pf = [](bool ok) { return ok ? "PASS" : "FAIL"; };
    out << "k=" << k << " consistency=" << pf(row_consistent) << " thm7=" << pf(thm7);
    if (ref && ref->p_star) {
      out << " thm6=" << pf(thm6);
      if (ref->y_star) out << " thm5=" << pf(thm5);
    }
    out << "\n";
    all_pass = all_pass && row_consistent && thm7 && thm6 && thm5;
  }
  out << (all_pass ? "all bounds PASS" : "bound violations detected") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace alcc::cli
