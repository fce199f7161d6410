#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "alcc/cli_driver.hpp"
#include "alcc/problem_io.hpp"

using namespace alcc;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path p = fs::temp_directory_path() / "alcc_cli_tests";
  fs::create_directories(p);
  return p;
}

std::string write_temp(const std::string& name, const std::string& contents) {
  fs::path p = temp_dir() / name;
  std::ofstream out(p);
  out << contents;
  return p.string();
}

int run_cli(const std::string& cmdline) {
  const std::string full = std::string(ALCC_CLI_PATH) + " " + cmdline + " > /dev/null 2>&1";
  const int rc = std::system(full.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("problem file round trip reproduces the in-memory solve bitwise") {
  LpFixture fx = random_solvable_lp(4, 3, 2024);
  ScheduleConfig sched;
  sched.max_outer = 12;
  sched.target_eps = 1e-6;

  SolveOptions mem_opts;
  mem_opts.reference = fx.reference();
  SolveTrace mem = solve(fx.prog, sched, mem_opts);

  const std::string path =
      write_temp("roundtrip.json", io::lp_fixture_to_json(fx).dump(2));
  io::ParsedProblem parsed = io::load_problem(path);
  SolveOptions file_opts;
  file_opts.x0 = parsed.x0;
  file_opts.reference = parsed.reference;
  SolveTrace file = solve(parsed.prog, sched, file_opts);

  REQUIRE(file.iterates.size() == mem.iterates.size());
  REQUIRE(file.status == mem.status);
  for (std::size_t i = 0; i < mem.iterates.size(); ++i) {
    REQUIRE(file.iterates[i].inner_iters == mem.iterates[i].inner_iters);
    REQUIRE(std::abs(file.iterates[i].obj - mem.iterates[i].obj) <= 1e-12);
    REQUIRE(std::abs(file.iterates[i].infeas - mem.iterates[i].infeas) <= 1e-12);
    REQUIRE(norm_inf(sub(file.iterates[i].x, mem.iterates[i].x)) <= 1e-12);
    REQUIRE(norm_inf(sub(file.iterates[i].y_next, mem.iterates[i].y_next)) <= 1e-12);
  }
}

TEST_CASE("lmi and minmax emissions parse back") {
  std::vector<SymMatrix> mats;
  mats.push_back(SymMatrix::from_full(2, {1, 0, 0, 1}));
  mats.push_back(SymMatrix::from_full(2, {1, 1, 1, 0}));
  mats.push_back(SymMatrix::from_full(2, {0, 0, 0, 2}));
  L1LmiInstance inst{mats, SymMatrix::from_full(2, {0.1, -0.05, -0.05, 0.2}), {0.4, 0.1, 0.1}};
  inst.validate();

  const std::string lmi_path = write_temp("lmi.json", io::lmi_instance_to_json(inst).dump(2));
  io::ParsedProblem lmi = io::load_problem(lmi_path);
  CHECK(lmi.prog.cone.kind() == Cone::Kind::Psd);
  CHECK(lmi.prog.prox.reg_kind() == SimpleSetProx::RegKind::L1);
  REQUIRE(lmi.x0.has_value());
  // the recast map agrees with the instance's own
  ConicProgram direct = lmi_program(inst);
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    Vector x = rng.gaussian_vector(3);
    REQUIRE(norm_inf(sub(lmi.prog.a_map.apply(x), direct.a_map.apply(x))) <= 1e-12);
  }
  REQUIRE(norm_inf(sub(lmi.prog.b, direct.b)) <= 1e-12);

  DenseMatrix c(2, 3);
  Rng grng(6);
  for (auto& v : c.entries) v = grng.uniform(-1.0, 1.0);
  DenseMatrix a(1, 3, {1.0, 1.0, 1.0});
  MinMaxGame game{c, 1.5, a, {0.9}, Cone::nonneg(1)};
  const std::string mm_path = write_temp("minmax.json", io::minmax_game_to_json(game).dump(2));
  io::ParsedProblem mm = io::load_problem(mm_path);
  CHECK(mm.prog.prox.set_kind() == SimpleSetProx::SetKind::Simplex);
  for (int rep = 0; rep < 10; ++rep) {
    Vector x = grng.gaussian_vector(3);
    auto [val, grad] = eval_gamma_minmax(game, x);
    REQUIRE(mm.prog.smooth.value(x) == Approx(val).margin(1e-12));
    REQUIRE(norm_inf(sub(mm.prog.smooth.gradient(x), grad)) <= 1e-12);
  }
  CHECK(mm.prog.smooth.lipschitz == Approx(game.sigma_max_sq() / game.tau).epsilon(1e-12));
}

TEST_CASE("schema violations name the offending field") {
  auto parse_str = [](const std::string& text) {
    return io::parse_problem(io::json::parse(text));
  };
  CHECK_THROWS_AS(parse_str("{\"n\": 2}"), ParseError);
  CHECK_THROWS_WITH(
      parse_str("{\"n\":1,\"cone\":{\"bogus\":1},\"A\":{\"dense\":[[1]]},\"b\":[0],"
                "\"set\":{\"simplex\":{}},\"smooth\":{\"zero\":{}}}"),
      Catch::Matchers::ContainsSubstring("cone"));
  CHECK_THROWS_WITH(
      parse_str("{\"n\":2,\"cone\":{\"nonneg\":1},\"A\":{\"dense\":[[1,1,1]]},\"b\":[0],"
                "\"set\":{\"simplex\":{}},\"smooth\":{\"zero\":{}}}"),
      Catch::Matchers::ContainsSubstring("A.dense"));
  CHECK_THROWS_WITH(
      parse_str("{\"n\":2,\"cone\":{\"nonneg\":1},\"A\":{\"dense\":[[1,1]]},\"b\":[0,0],"
                "\"set\":{\"simplex\":{}},\"smooth\":{\"zero\":{}}}"),
      Catch::Matchers::ContainsSubstring("b"));
  // unsupported pair surfaces as a schema error, not a crash at solve time
  CHECK_THROWS_WITH(
      parse_str("{\"n\":2,\"cone\":{\"nonneg\":1},\"A\":{\"dense\":[[1,1]]},\"b\":[0],"
                "\"set\":{\"simplex\":{}},\"reg\":{\"l1\":{\"lambda\":1.0}},"
                "\"smooth\":{\"zero\":{}}}"),
      Catch::Matchers::ContainsSubstring("reg"));
}

TEST_CASE("set and regularizer grammar fragment") {
  io::json set_j = io::json::parse("{\"l1ball\":{\"r\":3.0}}");
  io::json reg_j = io::json::parse("{\"l1\":{\"lambda\":1.0}}");
  SimpleSetProx s = io::detail::parse_set_and_reg(set_j, reg_j, 4);
  CHECK(s.set_kind() == SimpleSetProx::SetKind::L1Ball);
  CHECK(s.set_radius() == 3.0);
  CHECK(s.reg_kind() == SimpleSetProx::RegKind::L1);
  CHECK(s.reg_weight() == 1.0);
  CHECK(s.diameter() == 6.0);
}

TEST_CASE("ALCC_LOG enables per-iterate logging on stderr") {
  LpFixture fx = random_solvable_lp(2, 2, 345);
  const std::string path = write_temp("log_lp.json", io::lp_fixture_to_json(fx).dump(2));
  const std::string log_file = (temp_dir() / "stderr_log.txt").string();
  const std::string cmd = std::string("ALCC_LOG=1 ") + ALCC_CLI_PATH + " solve " + path +
                          " > /dev/null 2> " + log_file;
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::ifstream in(log_file);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(contents.find("[alcc] k=1") != std::string::npos);

  // without the variable the channel stays quiet
  const std::string cmd2 = std::string("ALCC_LOG= ") + ALCC_CLI_PATH + " solve " + path +
                           " > /dev/null 2> " + log_file;
  REQUIRE(WEXITSTATUS(std::system(cmd2.c_str())) == 0);
  std::ifstream in2(log_file);
  std::string contents2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
  CHECK(contents2.empty());
}

TEST_CASE("cone grammar parses products") {
  io::json doc = io::json::parse(
      "{\"product\":[{\"nonneg\":3},{\"soc\":4},{\"psd\":2}]}");
  Cone c = io::detail::parse_cone(doc, "cone");
  CHECK(c.kind() == Cone::Kind::Product);
  CHECK(c.dim() == 3 + 4 + 3);
  io::json back = io::detail::cone_to_json(c);
  CHECK(back == doc);
}

TEST_CASE("solve subcommand exit codes") {
  LpFixture fx = random_solvable_lp(2, 2, 345);
  const std::string path = write_temp("cli_lp.json", io::lp_fixture_to_json(fx).dump(2));
  const std::string trace_json = (temp_dir() / "cli_trace.json").string();
  const std::string trace_csv = (temp_dir() / "cli_trace.csv").string();

  CHECK(run_cli("solve " + path + " --eps 1e-6 --json " + trace_json + " --trace " + trace_csv) ==
        cli::kExitConverged);
  CHECK(fs::exists(trace_json));
  CHECK(fs::exists(trace_csv));

  // trace CSV carries the version tag and fixed column order
  std::ifstream csv(trace_csv);
  std::string line1, line2;
  std::getline(csv, line1);
  std::getline(csv, line2);
  CHECK(line1 == "# alcc-trace/1");
  CHECK(line2 ==
        "k,mu,alpha,eta,inner_iters,infeas,obj,y_norm,thm7_residual,thm6_residual,thm5_residual");

  CHECK(run_cli("solve " + path + " --eps 1e-12 --max-outer 2") == cli::kExitMaxOuter);
  CHECK(run_cli("solve " + path +
                " --beta 3 --c 0.25 --alpha0 0.5 --eta0 0.5 --mu0 2 --eps 1e-5 --max-outer 40"
                " --seed 7") == cli::kExitConverged);
  CHECK(run_cli("solve " + write_temp("bad.json", "{\"n\": oops")) == cli::kExitUsage);
  CHECK(run_cli("solve /definitely/not/a/file.json") == cli::kExitUsage);
}

TEST_CASE("committed fixtures solve through the binary") {
  const std::string dir = ALCC_FIXTURE_DIR;
  const std::string trace_csv = (temp_dir() / "zero_cone_trace.csv").string();

  // trivial zero-cone program: one or two outer rows, exit 0
  CHECK(run_cli("solve " + dir + "/zero_cone.json --trace " + trace_csv) == cli::kExitConverged);
  std::ifstream csv(trace_csv);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(csv, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'k') ++rows;
  CHECK(rows >= 1);
  CHECK(rows <= 2);

  // two-variable LP with an embedded reference: converged means the
  // objective matched p* to the target
  const std::string trace_json = (temp_dir() / "lp_small_trace.json").string();
  CHECK(run_cli("solve " + dir + "/lp_small.json --eps 1e-5 --json " + trace_json) ==
        cli::kExitConverged);
  std::ifstream in(trace_json);
  io::json doc = io::json::parse(in);
  const double obj = doc.at("iterates").back().at("obj").get<double>();
  CHECK(std::abs(obj - 1.0) <= 1e-5);

  CHECK(run_cli("solve " + dir + "/lmi_small.json --eps 1e-6 --max-outer 40") ==
        cli::kExitConverged);
}

TEST_CASE("check-bounds passes healthy traces and catches corruption") {
  LpFixture fx = random_solvable_lp(3, 2, 777);
  const std::string path = write_temp("audit_lp.json", io::lp_fixture_to_json(fx).dump(2));
  const std::string trace_json = (temp_dir() / "audit_trace.json").string();
  REQUIRE(run_cli("solve " + path + " --eps 1e-6 --json " + trace_json) == 0);

  std::ostringstream out, err;
  CHECK(cli::run_check_bounds(trace_json, path, out, err) == 0);
  CHECK(out.str().find("all bounds PASS") != std::string::npos);

  // corrupt the infeasibility column: audit must fail
  io::json doc;
  {
    std::ifstream in(trace_json);
    doc = io::json::parse(in);
  }
  doc["iterates"][0]["infeas"] = doc["iterates"][0]["infeas"].get<double>() + 0.125;
  const std::string bad_trace = write_temp("audit_trace_bad.json", doc.dump(2));
  std::ostringstream out2, err2;
  CHECK(cli::run_check_bounds(bad_trace, path, out2, err2) == 1);
  CHECK(out2.str().find("FAIL") != std::string::npos);

  // mismatched problem file is rejected by the hash check
  const std::string other = write_temp("audit_other.json",
                                       io::lp_fixture_to_json(random_solvable_lp(3, 2, 778)).dump(2));
  std::ostringstream out3, err3;
  CHECK(cli::run_check_bounds(trace_json, other, out3, err3) == 1);
  CHECK(err3.str().find("mismatch") != std::string::npos);
}
