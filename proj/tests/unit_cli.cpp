#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "philap/config.hpp"
#include "philap/report.hpp"
#include "philap/timeexpr.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

using namespace philap;
using nlohmann::json;

namespace {

std::string data_path(const std::string& name) {
  return std::string(PHILAP_TEST_DATA_DIR) + "/" + name;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("philap_test_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

Config tiny_solve_config() {
  return Config::parse(R"(
phi.family = power
phi.p = 2
phi.dimension = 1
potential.term.0.kind = gfunc
potential.term.0.phi.family = power
potential.term.0.phi.p = 2
potential.term.0.phi.dimension = 1
potential.term.1.kind = linear
potential.term.1.vector = 1
potential.term.1.coef = cos(t)
problem.nodes = 32
solver.restarts = 2
)");
}

}  // namespace

TEST_CASE("config parsing handles comments, blanks and spacing") {
  Config cfg = Config::parse(
      "# leading comment\n"
      "\n"
      "  a.b =  1.5  # trailing comment\n"
      "c = hello world\n");
  CHECK(cfg.entries().size() == 2);
  CHECK(cfg.number("a.b") == doctest::Approx(1.5));
  CHECK(cfg.get("c") == "hello world");
  CHECK(cfg.has("a.b"));
  CHECK(!cfg.has("missing"));
  CHECK(cfg.get_or("missing", "x") == "x");
}

TEST_CASE("config errors carry line numbers") {
  try {
    Config::parse("ok = 1\nbroken line\n");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::parse("= novalue\n"), std::invalid_argument);
}

TEST_CASE("serialize then parse is the identity") {
  Config cfg = Config::parse("b = 2\na = 13/6\nz.q = sin(t)\n");
  const std::string text = cfg.serialize();
  Config again = Config::parse(text);
  CHECK(again.entries() == cfg.entries());
  CHECK(again.serialize() == text);
  // Sorted output.
  CHECK(text.find("a = ") < text.find("b = "));
  CHECK(text.find("b = ") < text.find("z.q = "));
}

TEST_CASE("numeric fields accept constant expressions") {
  Config cfg = Config::parse(
      "a = 13/6\nb = 2*pi\nc = 1e22\nd = 10^-3\nn = 256\nbad = sin(t)\n");
  CHECK(cfg.number("a") == doctest::Approx(13.0 / 6.0).epsilon(1e-15));
  CHECK(cfg.number("b") == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(cfg.number("c") == doctest::Approx(1e22));
  CHECK(cfg.number("d") == doctest::Approx(1e-3));
  CHECK(cfg.integer("n") == 256);
  CHECK(cfg.number_or("missing", 7.0) == 7.0);
  CHECK(cfg.integer_or("missing", 3) == 3);
  // t-dependent and fractional values are rejected where numbers are needed.
  CHECK_THROWS_AS(cfg.number("bad"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.integer("a"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.number("missing"), std::invalid_argument);
}

TEST_CASE("number and int lists split on commas") {
  Config cfg = Config::parse("r = 1e-3, 1, 4/2\nc = 0, 1\n");
  auto r = cfg.number_list("r");
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(1e-3));
  CHECK(r[2] == doctest::Approx(2.0));
  auto c = cfg.int_list("c");
  REQUIRE(c.size() == 2);
  CHECK(c[0] == 0);
  CHECK(c[1] == 1);
}

TEST_CASE("count_terms scans consecutive indices") {
  Config cfg = Config::parse(
      "potential.term.0.kind = abs\n"
      "potential.term.1.kind = power\n"
      "potential.term.3.kind = abs\n");
  // Index 2 is missing: the scan stops there.
  CHECK(cfg.count_terms("potential.term") == 2);
  CHECK(Config().count_terms("potential.term") == 0);
}

TEST_CASE("time expressions evaluate the documented grammar") {
  CHECK(TimeExpr::parse("2 + 3*4")(0.0) == doctest::Approx(14.0));
  CHECK(TimeExpr::parse("(2+3)*4")(0.0) == doctest::Approx(20.0));
  CHECK(TimeExpr::parse("2^3^2")(0.0) == doctest::Approx(512.0));  // right assoc
  CHECK(TimeExpr::parse("abs(cos(t)) + 2")(kPi) == doctest::Approx(3.0));
  CHECK(TimeExpr::parse("sin(t)")(kPi / 2.0) == doctest::Approx(1.0));
  CHECK(TimeExpr::parse("1/t")(2.0) == doctest::Approx(0.5));
  CHECK(TimeExpr::parse("pi")(0.0) == doctest::Approx(kPi));
  CHECK(TimeExpr::parse("-t + 1")(3.0) == doctest::Approx(-2.0));
  CHECK(TimeExpr::parse("1e-3")(0.0) == doctest::Approx(1e-3));

  CHECK(TimeExpr::parse("2*pi").constant());
  CHECK(!TimeExpr::parse("cos(t)").constant());
  CHECK(TimeExpr::parse("sin(t)").fn()(kPi / 2.0) == doctest::Approx(1.0));
  CHECK(TimeExpr::parse(" 1 + 1 ").text() == " 1 + 1 ");

  CHECK(parse_constant_expression("13/6") == doctest::Approx(13.0 / 6.0));
  CHECK_THROWS_AS(parse_constant_expression("t"), std::invalid_argument);
}

TEST_CASE("time expression errors name the offending position") {
  for (const char* bad : {"", "2 +", "(1", "sin 3", "1 $ 2", "foo(2)"}) {
    CHECK_THROWS_AS(TimeExpr::parse(bad), std::invalid_argument);
  }
  try {
    TimeExpr::parse("1 + $");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("build_gfunction reads family descriptors") {
  Config cfg = Config::parse(
      "phi.family = block\n"
      "phi.exponents = 3, 3\n"
      "phi.dims = 1, 1\n");
  GFunction phi = build_gfunction(cfg, "phi");
  CHECK(phi.family() == "block");
  CHECK(phi.dimension() == 2);

  Config pw = Config::parse("phi.family = power\nphi.p = 13/6\nphi.dimension = 2\n");
  CHECK(build_gfunction(pw, "phi").dimension() == 2);

  Config bad = Config::parse("phi.family = nope\n");
  CHECK_THROWS_AS(build_gfunction(bad, "phi"), std::invalid_argument);
}

TEST_CASE("build_potential assembles each term kind") {
  Config cfg = Config::parse(
      "potential.term.0.kind = power\n"
      "potential.term.0.exponent = 13/6\n"
      "potential.term.0.coords = 0\n"
      "potential.term.1.kind = abs\n"
      "potential.term.1.coords = 1\n"
      "potential.term.1.coef = 2\n"
      "potential.term.2.kind = coord_product\n"
      "potential.term.2.coords = 0, 1\n"
      "potential.term.3.kind = linear\n"
      "potential.term.3.vector = 1, -1\n"
      "potential.term.3.coef = cos(t)\n"
      "potential.term.4.kind = constant\n"
      "potential.term.4.coef = 1/2\n"
      "potential.term.5.kind = max_affine\n"
      "potential.term.5.pieces = 2\n"
      "potential.term.5.piece.0.vector = 1, 0\n"
      "potential.term.5.piece.0.offset = 0\n"
      "potential.term.5.piece.1.vector = 0, 1\n"
      "potential.term.5.piece.1.offset = 1\n");
  Potential F = build_potential(cfg, 2, 2.0 * kPi);
  CHECK(F.dimension() == 2);
  CHECK(F.terms().size() == 6);
  Vec x(2);
  x << 2.0, -3.0;
  const double t = kPi / 3.0;
  const double expect = std::pow(2.0, 13.0 / 6.0) + 2.0 * 3.0 +
                        (2.0 * -3.0) + std::cos(t) * (2.0 - -3.0) + 0.5 +
                        std::max(2.0, -3.0 + 1.0);
  CHECK(F.value(t, x) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("build_potential validates terms") {
  // Exponent must exceed one.
  Config e = Config::parse(
      "potential.term.0.kind = power\npotential.term.0.exponent = 1\n");
  CHECK_THROWS_AS(build_potential(e, 1, 1.0), std::invalid_argument);
  // Unknown kind.
  Config k = Config::parse("potential.term.0.kind = wiggle\n");
  CHECK_THROWS_AS(build_potential(k, 1, 1.0), std::invalid_argument);
  // Out-of-range coordinates.
  Config c = Config::parse(
      "potential.term.0.kind = abs\npotential.term.0.coords = 2\n");
  CHECK_THROWS_AS(build_potential(c, 2, 1.0), std::invalid_argument);
  // Vector length must match the dimension.
  Config v = Config::parse(
      "potential.term.0.kind = linear\npotential.term.0.vector = 1\n");
  CHECK_THROWS_AS(build_potential(v, 2, 1.0), std::invalid_argument);
  // coord_product needs exactly two coordinates.
  Config p = Config::parse(
      "potential.term.0.kind = coord_product\npotential.term.0.coords = 0\n");
  CHECK_THROWS_AS(build_potential(p, 2, 1.0), std::invalid_argument);
  // Nonsmooth coefficients must stay nonnegative on the horizon.
  Config n = Config::parse(
      "potential.term.0.kind = abs\n"
      "potential.term.0.coords = 0\n"
      "potential.term.0.coef = sin(t)\n");
  CHECK_THROWS_AS(build_potential(n, 1, 2.0 * kPi), std::invalid_argument);
}

TEST_CASE("build_problem applies defaults and wiring") {
  Config cfg = Config::parse(
      "phi.family = power\n"
      "phi.p = 3\n"
      "phi.dimension = 1\n"
      "phi0.family = power\n"
      "phi0.p = 2\n"
      "phi0.dimension = 1\n"
      "potential.term.0.kind = abs\n"
      "potential.term.0.coords = 0\n"
      "hypotheses.b = abs(cos(t)) + 2\n"
      "hypotheses.d = 2\n"
      "hypotheses.lambda = 1/2\n"
      "hypotheses.mu = 1/2\n"
      "solver.restarts = 3\n"
      "solver.tol_residual = 1e-4\n"
      "probes.samples = 64\n"
      "probes.radii = 1, 10, 100\n");
  ProblemSetup setup = build_problem(cfg);
  CHECK(setup.period == doctest::Approx(2.0 * kPi));
  CHECK(setup.nodes == 256);
  REQUIRE(setup.phi0.has_value());
  CHECK(setup.phi0->family() == "power");
  REQUIRE(setup.F.has_value());
  CHECK(setup.F->dimension() == 1);
  CHECK(setup.solver.restarts == 3);
  CHECK(setup.solver.tol_residual == doctest::Approx(1e-4));
  CHECK(setup.probes.samples == 64);
  REQUIRE(setup.probes.radii.size() == 3);
  CHECK(setup.b(0.0) == doctest::Approx(3.0));
  CHECK(setup.d(1.0) == doctest::Approx(2.0));
  CHECK(setup.b_text == "abs(cos(t)) + 2");
  REQUIRE(setup.lambda.has_value());
  CHECK(*setup.lambda == doctest::Approx(0.5));
  CHECK(!setup.pasca_p.has_value());
}

TEST_CASE("build_problem rejects inconsistent sections") {
  // phi is required.
  CHECK_THROWS_AS(build_problem(Config::parse("problem.nodes = 8\n")),
                  std::invalid_argument);
  // Potential dimension must match phi.
  Config mism = Config::parse(
      "phi.family = power\nphi.p = 2\nphi.dimension = 1\n"
      "potential.dimension = 2\n"
      "potential.term.0.kind = abs\npotential.term.0.coords = 0\n");
  CHECK_THROWS_AS(build_problem(mism), std::invalid_argument);
  // Period must be positive.
  Config neg = Config::parse(
      "phi.family = power\nphi.p = 2\nphi.dimension = 1\nproblem.period = -1\n");
  CHECK_THROWS_AS(build_problem(neg), std::invalid_argument);
}

TEST_CASE("analyze report carries the function analysis sections") {
  Config cfg = Config::parse(
      "phi.family = power\nphi.p = 3\nphi.dimension = 1\n"
      "phi0.family = log_damped_companion\nphi0.p = 3\nphi0.dimension = 1\n");
  RunOutput out = run_analyze(cfg);
  CHECK(out.exit_code == 0);
  json doc = json::parse(out.report_json);
  CHECK(doc.contains("config_echo"));
  REQUIRE(doc.contains("analysis"));
  REQUIRE(doc["analysis"].contains("phi"));
  REQUIRE(doc["analysis"].contains("phi0"));
  const auto& phi = doc["analysis"]["phi"];
  CHECK(phi["family"] == "power");
  CHECK(phi["n_function"] == true);
  CHECK(phi["validation"].is_null());
  CHECK(phi["conjugate_table"].size() == 25);
  CHECK(phi["delta2"]["unbounded"] == false);
  const double alpha = phi["indices"]["alpha"].get<double>();
  CHECK(alpha == doctest::Approx(3.0).epsilon(0.02));
  // Conjugate of |x|^3/3 at r = 100 along e1: (100^{1.5})/1.5.
  bool found = false;
  for (const auto& row : phi["conjugate_table"]) {
    if (std::abs(row["r"].get<double>() - 100.0) < 1e-9) {
      found = true;
      CHECK(row["conjugate"].get<double>() ==
            doctest::Approx(std::pow(100.0, 1.5) / 1.5).epsilon(1e-6));
    }
  }
  CHECK(found);
}

TEST_CASE("check report grades hypotheses and names theorems") {
  Config cfg = Config::load_file(data_path("block_example.conf"));
  // Shrink the probe budget: unit scope, the full ladder runs elsewhere.
  cfg.set("probes.samples", "96");
  cfg.set("probes.pair_samples", "20000");
  RunOutput out = run_check(cfg);
  CHECK(out.exit_code == 0);
  REQUIRE(out.hypotheses.has_value());
  json doc = json::parse(out.report_json);
  REQUIRE(doc.contains("hypotheses"));
  const auto& entries = doc["hypotheses"]["entries"];
  REQUIRE(entries.size() == 12);
  bool saw_theorem1 = false;
  for (const auto& name : doc["hypotheses"]["theorems_passing"])
    if (name == "theorem1") saw_theorem1 = true;
  CHECK(saw_theorem1);
  // Failing entries must carry a recheckable witness.
  for (const auto& e : entries) {
    if (e["status"] == "fail") {
      CHECK(e.contains("witness"));
      CHECK(!e["summary"].get<std::string>().empty());
    }
  }
}

TEST_CASE("solve writes a csv whose numbers reproduce the report") {
  Config cfg = tiny_solve_config();
  auto dir = scratch_dir("solve");
  RunOutput out = run_solve(cfg, dir.string());
  CHECK(out.exit_code == 0);
  json doc = json::parse(out.report_json);
  REQUIRE(doc.contains("solve"));
  CHECK(doc["solve"]["verified"] == true);
  CHECK(doc["solve"]["trajectory_csv"] == "solution.csv");

  // Recompute action and residual from the CSV and the config alone.
  Trajectory u = read_trajectory_csv_file((dir / "solution.csv").string());
  ProblemSetup setup = build_problem(cfg);
  DiscreteProblem prob(setup.phi, *setup.F, setup.period, setup.nodes,
                       setup.solver);
  CHECK(action(prob, u) ==
        doctest::Approx(doc["solve"]["action"].get<double>()).epsilon(1e-14));
  CHECK(el_residual(prob, u).max ==
        doctest::Approx(doc["solve"]["residual"]["max"].get<double>())
            .epsilon(1e-12));
  std::filesystem::remove_all(dir);
}

TEST_CASE("solve reports are byte identical across runs") {
  Config cfg = tiny_solve_config();
  auto d1 = scratch_dir("det1");
  auto d2 = scratch_dir("det2");
  RunOutput a = run_solve(cfg, d1.string());
  RunOutput b = run_solve(cfg, d2.string());
  CHECK(a.report_json == b.report_json);
  std::ifstream f1(d1 / "solution.csv"), f2(d2 / "solution.csv");
  std::string s1((std::istreambuf_iterator<char>(f1)),
                 std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)),
                 std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  CHECK(!s1.empty());
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("seed changes flow into the report but keep convergence") {
  Config cfg = tiny_solve_config();
  auto dir = scratch_dir("seed");
  RunOutput a = run_solve(cfg, dir.string());
  cfg.set("solver.seed", "99");
  RunOutput b = run_solve(cfg, dir.string());
  CHECK(a.report_json != b.report_json);  // config echo differs
  json da = json::parse(a.report_json);
  json db = json::parse(b.report_json);
  // Convex problem: same minimizer value regardless of seed.
  CHECK(da["solve"]["action"].get<double>() ==
        doctest::Approx(db["solve"]["action"].get<double>()).epsilon(1e-6));
  std::filesystem::remove_all(dir);
}

TEST_CASE("unverified solves exit with status two") {
  Config cfg = tiny_solve_config();
  // Quartic potential: state-dependent curvature, so three descent steps
  // cannot verify the residual tolerance from any start.
  cfg.set("potential.term.0.phi.p", "4");
  cfg.set("solver.max_iterations", "3");
  auto dir = scratch_dir("budget");
  RunOutput out = run_solve(cfg, dir.string());
  CHECK(out.exit_code == 2);
  json doc = json::parse(out.report_json);
  CHECK(doc["solve"]["converged"] == false);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convergence study halves the step and reports orders") {
  Config cfg = tiny_solve_config();
  auto dir = scratch_dir("conv");
  RunOutput out = run_convergence(cfg, 2, dir.string());
  CHECK(out.exit_code == 0);
  json doc = json::parse(out.report_json);
  REQUIRE(doc.contains("convergence"));
  CHECK(doc["convergence"]["levels"] == 2);
  const auto& rows = doc["convergence"]["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["nodes"] == 32);
  CHECK(rows[1]["nodes"] == 64);
  CHECK(rows[2]["nodes"] == 128);
  for (const auto& row : rows) {
    CHECK(row["verified"] == true);
    const std::string csv = row["trajectory_csv"].get<std::string>();
    CHECK(std::filesystem::exists(dir / csv));
  }
  // The forced quadratic discretization converges at second order.
  const auto& orders = doc["convergence"]["action_orders"];
  REQUIRE(orders.size() >= 1);
  CHECK(orders.back().get<double>() == doctest::Approx(2.0).epsilon(0.2));
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed configs throw before any report is produced") {
  CHECK_THROWS_AS(run_analyze(Config::parse("problem.nodes = 8\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_convergence(tiny_solve_config(), -1, "."),
                  std::invalid_argument);
}
