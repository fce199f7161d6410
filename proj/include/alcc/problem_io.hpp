#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "alcc/problems.hpp"
#include "alcc/solver.hpp"

namespace alcc::io {

using nlohmann::json;

inline constexpr const char* kTraceFormatTag = "alcc-trace/1";

/// FNV-1a 64-bit hash of raw file bytes, used to pair traces with the problem
/// file that produced them.
inline std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Atomic text write: temp file in the same directory, then rename.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp);
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

struct ParsedProblem {
  ConicProgram prog;
  std::optional<Vector> x0;
  std::optional<Reference> reference;
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& field, const std::string& what) {
  throw ParseError("problem file: field '" + field + "': " + what);
}

inline Vector parse_vector(const json& j, const std::string& field) {
  if (!j.is_array()) schema_error(field, "expected an array of numbers");
  Vector v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) schema_error(field, "expected an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

inline DenseMatrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    schema_error(field, "expected an array of row arrays");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) schema_error(field, "ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) schema_error(field, "expected numbers");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols; ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Cone parse_cone(const json& j, const std::string& field) {
  if (!j.is_object() || j.size() != 1) schema_error(field, "expected a single-key cone object");
  const std::string key = j.begin().key();
  const json& val = j.begin().value();
  if (key == "zero") return Cone::zero(val.get<std::size_t>());
  if (key == "nonneg") return Cone::nonneg(val.get<std::size_t>());
  if (key == "soc") return Cone::second_order(val.get<std::size_t>());
  if (key == "psd") return Cone::psd(val.get<std::size_t>());
  if (key == "product") {
    if (!val.is_array()) schema_error(field, "product expects an array");
    std::vector<Cone> parts;
    for (std::size_t i = 0; i < val.size(); ++i)
      parts.push_back(parse_cone(val[i], field + ".product[" + std::to_string(i) + "]"));
    return Cone::product(std::move(parts));
  }
  schema_error(field, "unknown cone variant '" + key + "'");
}

inline json cone_to_json(const Cone& c) {
  switch (c.kind()) {
    case Cone::Kind::Zero: return json{{"zero", c.dim()}};
    case Cone::Kind::NonNeg: return json{{"nonneg", c.dim()}};
    case Cone::Kind::SecondOrder: return json{{"soc", c.dim()}};
    case Cone::Kind::Psd: return json{{"psd", c.psd_side()}};
    case Cone::Kind::Product: {
      json parts = json::array();
      for (const auto& p : c.parts()) parts.push_back(cone_to_json(p));
      return json{{"product", std::move(parts)}};
    }
    case Cone::Kind::Free: break;
  }
  throw Error("cone_to_json: unsupported cone");
}

inline SimpleSetProx parse_set_and_reg(const json& set_j, const json& reg_j, std::size_t n) {
  if (!set_j.is_object() || set_j.size() != 1) schema_error("set", "expected a single-key object");
  const std::string key = set_j.begin().key();
  const json& val = set_j.begin().value();
  std::optional<SimpleSetProx> base;
  if (key == "box") {
    Vector lo = parse_vector(val.at("lo"), "set.box.lo");
    Vector hi = parse_vector(val.at("hi"), "set.box.hi");
    if (lo.size() != n) schema_error("set.box", "dimension does not match n");
    base = SimpleSetProx::box(std::move(lo), std::move(hi));
  } else if (key == "l1ball") {
    base = SimpleSetProx::l1_ball(n, val.at("r").get<double>());
  } else if (key == "l2ball") {
    Vector c = parse_vector(val.at("c"), "set.l2ball.c");
    if (c.size() != n) schema_error("set.l2ball", "center dimension does not match n");
    base = SimpleSetProx::l2_ball(std::move(c), val.at("r").get<double>());
  } else if (key == "simplex") {
    base = SimpleSetProx::simplex(n);
  } else if (key == "bounded") {
    base = SimpleSetProx::bounded(n, val.at("R").get<double>());
  } else {
    schema_error("set", "unknown set variant '" + key + "'");
  }

  if (reg_j.is_null()) return *base;
  if (!reg_j.is_object() || reg_j.size() != 1) schema_error("reg", "expected a single-key object");
  const std::string rkey = reg_j.begin().key();
  const json& rval = reg_j.begin().value();
  if (rkey == "zero") return *base;
  if (rkey == "l1") {
    try {
      return base->with_l1_reg(rval.at("lambda").get<double>());
    } catch (const UnsupportedCombination& e) {
      schema_error("reg", e.what());
    }
  }
  schema_error("reg", "unknown regularizer variant '" + rkey + "'");
}

inline json set_to_json(const SimpleSetProx& s) {
  using SetKind = SimpleSetProx::SetKind;
  switch (s.set_kind()) {
    case SetKind::Box: {
      json lo = json::array(), hi = json::array();
      for (double v : s.box_lo()) lo.push_back(v);
      for (double v : s.box_hi()) hi.push_back(v);
      return json{{"box", {{"lo", std::move(lo)}, {"hi", std::move(hi)}}}};
    }
    case SetKind::L1Ball: return json{{"l1ball", {{"r", s.set_radius()}}}};
    case SetKind::L2Ball: {
      json c = json::array();
      for (double v : s.ball_center()) c.push_back(v);
      return json{{"l2ball", {{"c", std::move(c)}, {"r", s.set_radius()}}}};
    }
    case SetKind::Simplex: return json{{"simplex", json::object()}};
    case SetKind::WholeSpaceBounded: return json{{"bounded", {{"R", s.set_radius()}}}};
  }
  throw Error("set_to_json: unreachable");
}

inline json reg_to_json(const SimpleSetProx& s) {
  if (s.reg_kind() == SimpleSetProx::RegKind::L1)
    return json{{"l1", {{"lambda", s.reg_weight()}}}};
  return json{{"zero", json::object()}};
}

}  // namespace detail

/// Parse a problem document. Dimension cross-checks run before anything is
/// solved; violations raise ParseError naming the offending field.
inline ParsedProblem parse_problem(const json& doc) {
  using detail::schema_error;
  if (!doc.is_object()) throw ParseError("problem file: top level must be an object");
  for (const char* field : {"n", "cone", "A", "b", "set", "smooth"})
    if (!doc.contains(field)) schema_error(field, "missing");

  const std::size_t n = doc.at("n").get<std::size_t>();
  if (n == 0) schema_error("n", "must be positive");
  Cone cone = detail::parse_cone(doc.at("cone"), "cone");
  Vector b = detail::parse_vector(doc.at("b"), "b");
  if (b.size() != cone.dim()) schema_error("b", "length does not match cone ambient dimension");

  // linear map
  const json& a_j = doc.at("A");
  if (!a_j.is_object() || a_j.size() != 1) schema_error("A", "expected a single-key object");
  LinearMap a_map = LinearMap::identity(0);
  if (a_j.contains("dense")) {
    DenseMatrix m = detail::parse_matrix(a_j.at("dense"), "A.dense");
    if (m.cols != n) schema_error("A.dense", "column count does not match n");
    if (m.rows != cone.dim()) schema_error("A.dense", "row count does not match cone dimension");
    a_map = LinearMap::from_matrix(std::move(m));
  } else if (a_j.contains("lmi")) {
    const json& lmi = a_j.at("lmi");
    const std::size_t d = lmi.at("d").get<std::size_t>();
    if (cone.kind() != Cone::Kind::Psd || cone.psd_side() != d)
      schema_error("A.lmi", "cone must be {\"psd\": d} with matching d");
    const json& mats = lmi.at("mats");
    if (!mats.is_array() || mats.size() != n) schema_error("A.lmi.mats", "need n matrices");
    DenseMatrix cols(SymMatrix::svec_len(d), n);
    for (std::size_t j = 0; j < n; ++j) {
      Vector full = detail::parse_vector(mats[j], "A.lmi.mats[" + std::to_string(j) + "]");
      if (full.size() != d * d)
        schema_error("A.lmi.mats[" + std::to_string(j) + "]", "need d*d row-major entries");
      SymMatrix sm = SymMatrix::from_full(d, full);
      for (std::size_t r = 0; r < sm.svec.size(); ++r) cols(r, j) = sm.svec[r];
    }
    a_map = LinearMap::from_matrix(std::move(cols));
  } else {
    schema_error("A", "expected 'dense' or 'lmi'");
  }

  SimpleSetProx prox = detail::parse_set_and_reg(
      doc.at("set"), doc.contains("reg") ? doc.at("reg") : json(), n);

  // smooth part
  const json& sm_j = doc.at("smooth");
  if (!sm_j.is_object() || sm_j.size() != 1) schema_error("smooth", "expected a single-key object");
  SmoothPart smooth = SmoothPart::zero();
  if (sm_j.contains("quadratic")) {
    DenseMatrix q = detail::parse_matrix(sm_j.at("quadratic").at("Q"), "smooth.quadratic.Q");
    Vector lin = detail::parse_vector(sm_j.at("quadratic").at("q"), "smooth.quadratic.q");
    if (q.rows != n || q.cols != n || lin.size() != n)
      schema_error("smooth.quadratic", "shapes do not match n");
    smooth = SmoothPart::quadratic(std::move(q), std::move(lin));
  } else if (sm_j.contains("minmax")) {
    DenseMatrix c = detail::parse_matrix(sm_j.at("minmax").at("C"), "smooth.minmax.C");
    const double tau = sm_j.at("minmax").at("tau").get<double>();
    if (c.cols != n) schema_error("smooth.minmax.C", "column count does not match n");
    if (!(tau > 0.0)) schema_error("smooth.minmax.tau", "must be positive");
    MinMaxGame game{c, tau, DenseMatrix(cone.dim(), n), b, cone};
    smooth = minmax_smooth_part(game);
  } else if (!sm_j.contains("zero")) {
    schema_error("smooth", "expected 'quadratic', 'minmax', or 'zero'");
  }

  ParsedProblem parsed{ConicProgram{std::move(prox), std::move(smooth), std::move(a_map),
                                    std::move(b), std::move(cone)},
                       std::nullopt, std::nullopt};
  parsed.prog.validate();

  if (doc.contains("x0")) {
    Vector x0 = detail::parse_vector(doc.at("x0"), "x0");
    if (x0.size() != n) schema_error("x0", "length does not match n");
    if (parsed.prog.prox.distance_to(x0) > 1e-8) schema_error("x0", "not inside the simple set");
    parsed.x0 = std::move(x0);
  }
  if (doc.contains("reference")) {
    const json& r = doc.at("reference");
    Reference ref;
    if (r.contains("p_star")) ref.p_star = r.at("p_star").get<double>();
    if (r.contains("x_star")) ref.x_star = detail::parse_vector(r.at("x_star"), "reference.x_star");
    if (r.contains("y_star")) {
      ref.y_star = detail::parse_vector(r.at("y_star"), "reference.y_star");
      if (ref.y_star->size() != parsed.prog.b.size())
        schema_error("reference.y_star", "length does not match b");
    }
    if (r.contains("dual_unique")) ref.dual_unique = r.at("dual_unique").get<bool>();
    parsed.reference = std::move(ref);
  }
  return parsed;
}

inline ParsedProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("problem file: invalid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

/// Emit an LP fixture in the problem-file schema (with reference block).
inline json lp_fixture_to_json(const LpFixture& fx) {
  const std::size_t n = fx.c.size();
  json q_zero = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(0.0);
    q_zero.push_back(std::move(row));
  }
  json lin = json::array();
  for (double v : fx.c) lin.push_back(v);
  json b = json::array();
  for (double v : fx.prog.b) b.push_back(v);
  json x_star = json::array(), y_star = json::array();
  for (double v : fx.x_star) x_star.push_back(v);
  for (double v : fx.y_star) y_star.push_back(v);
  return json{{"n", n},
              {"cone", detail::cone_to_json(fx.prog.cone)},
              {"A", {{"dense", detail::matrix_to_json(fx.a)}}},
              {"b", std::move(b)},
              {"set", detail::set_to_json(fx.prog.prox)},
              {"reg", detail::reg_to_json(fx.prog.prox)},
              {"smooth", {{"quadratic", {{"Q", std::move(q_zero)}, {"q", std::move(lin)}}}}},
              {"reference",
               {{"p_star", fx.p_star},
                {"x_star", std::move(x_star)},
                {"y_star", std::move(y_star)},
                {"dual_unique", fx.dual_unique}}}};
}

/// Emit an l1-LMI instance in the problem-file schema.
inline json lmi_instance_to_json(const L1LmiInstance& inst) {
  const std::size_t n = inst.num_vars();
  const std::size_t d = inst.matrix_dim();
  json mats = json::array();
  for (const auto& m : inst.a_mats) {
    json full = json::array();
    for (double v : m.to_full()) full.push_back(v);
    mats.push_back(std::move(full));
  }
  json b = json::array();
  for (double v : inst.b_mat.svec) b.push_back(-v);  // svec(-B)
  json x0 = json::array();
  for (double v : inst.x0) x0.push_back(v);
  return json{{"n", n},
              {"cone", {{"psd", d}}},
              {"A", {{"lmi", {{"d", d}, {"mats", std::move(mats)}}}}},
              {"b", std::move(b)},
              {"set", {{"l1ball", {{"r", inst.radius()}}}}},
              {"reg", {{"l1", {{"lambda", 1.0}}}}},
              {"smooth", {{"zero", json::object()}}},
              {"x0", std::move(x0)}};
}

/// Emit a min-max game in the problem-file schema.
inline json minmax_game_to_json(const MinMaxGame& game) {
  json b = json::array();
  for (double v : game.b) b.push_back(v);
  return json{{"n", game.num_actions()},
              {"cone", detail::cone_to_json(game.cone)},
              {"A", {{"dense", detail::matrix_to_json(game.a)}}},
              {"b", std::move(b)},
              {"set", {{"simplex", json::object()}}},
              {"reg", {{"zero", json::object()}}},
              {"smooth", {{"minmax", {{"C", detail::matrix_to_json(game.c_payoff)},
                                      {"tau", game.tau}}}}}};
}

// ---------------------------------------------------------------------------
// trace output
// ---------------------------------------------------------------------------

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxOuterReached: return "max_outer_reached";
    case SolveStatus::NumericFailure: return "numeric_failure";
  }
  return "?";
}

inline json certificate_to_json(const Certificate& c) {
  return json{{"primal_infeas", c.primal_infeas},
              {"dual_membership", c.dual_membership},
              {"complementarity", c.complementarity},
              {"stationarity", c.stationarity},
              {"primal_infeas_rel", c.primal_infeas_rel()},
              {"dual_membership_rel", c.dual_membership_rel()},
              {"complementarity_rel", c.complementarity_rel()},
              {"stationarity_rel", c.stationarity_rel()}};
}

inline json trace_to_json(const SolveTrace& trace, const ScheduleConfig& sched,
                          const std::string& problem_hash) {
  json iterates = json::array();
  for (const auto& it : trace.iterates) {
    json x = json::array(), y = json::array(), y_next = json::array();
    for (double v : it.x) x.push_back(v);
    for (double v : it.y) y.push_back(v);
    for (double v : it.y_next) y_next.push_back(v);
    json row{{"k", it.k},
             {"mu", it.mu},
             {"alpha", it.alpha},
             {"eta", it.eta},
             {"xi", it.xi},
             {"inner_iters", it.inner_iters},
             {"infeas", it.infeas},
             {"obj", it.obj},
             {"y_norm", norm2(it.y)},
             {"oracle_condition",
              it.oracle_cert.condition == OracleCondition::FunctionGap ? "gap" : "subgradient"},
             {"oracle_value", it.oracle_cert.value},
             {"oracle_cap", it.oracle_cert.iter_cap},
             {"x", std::move(x)},
             {"y", std::move(y)},
             {"y_next", std::move(y_next)},
             {"thm7_residual", it.thm7_residual}};
    row["thm6_residual"] = it.thm6_residual ? json(*it.thm6_residual) : json();
    row["thm5_residual"] = it.thm5_residual ? json(*it.thm5_residual) : json();
    row["thm4_residual"] = it.thm4_residual ? json(*it.thm4_residual) : json();
    iterates.push_back(std::move(row));
  }
  json doc{{"format", kTraceFormatTag},
           {"problem_hash", problem_hash},
           {"config",
            {{"alpha0", sched.alpha0},
             {"eta0", sched.eta0},
             {"mu0", sched.mu0},
             {"beta", sched.beta},
             {"c", sched.c},
             {"max_outer", sched.max_outer},
             {"target_eps", sched.target_eps},
             {"seed", sched.seed}}},
           {"sigma_max", trace.sigma_max},
           {"status", status_name(trace.status)},
           {"iterates", std::move(iterates)},
           {"final", {{"certificate", certificate_to_json(trace.final_kkt)}}}};
  if (!trace.iterates.empty()) {
    json xf = json::array(), yf = json::array();
    for (double v : trace.iterates.back().x) xf.push_back(v);
    for (double v : trace.iterates.back().y_next) yf.push_back(v);
    doc["final"]["x"] = std::move(xf);
    doc["final"]["y"] = std::move(yf);
  }
  if (!trace.failure_message.empty()) doc["failure_message"] = trace.failure_message;
  return doc;
}

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV trace, columns fixed and versioned by the format tag on line one.
inline std::string trace_to_csv(const SolveTrace& trace) {
  std::ostringstream out;
  out << "# " << kTraceFormatTag << "\n";
  out << "k,mu,alpha,eta,inner_iters,infeas,obj,y_norm,thm7_residual,thm6_residual,thm5_residual\n";
  for (const auto& it : trace.iterates) {
    out << it.k << ',' << format_full(it.mu) << ',' << format_full(it.alpha) << ','
        << format_full(it.eta) << ',' << it.inner_iters << ',' << format_full(it.infeas) << ','
        << format_full(it.obj) << ',' << format_full(norm2(it.y)) << ','
        << format_full(it.thm7_residual) << ','
        << (it.thm6_residual ? format_full(*it.thm6_residual) : "nan") << ','
        << (it.thm5_residual ? format_full(*it.thm5_residual) : "nan") << "\n";
  }
  return out.str();
}

}  // namespace alcc::io
