#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "philap/solver.hpp"
#include "philap/sampling.hpp"

#include <cmath>
#include <stdexcept>

using namespace philap;

namespace {

TimeFn one = [](double) { return 1.0; };

SmoothSpatial quadratic() {
  SmoothSpatial f;
  f.value = [](ConstVecRef x) { return 0.5 * x.squaredNorm(); };
  f.grad = [](ConstVecRef x) { return Vec(x); };
  return f;
}

Potential empty_potential(int dim, double horizon = 2.0 * kPi) {
  return Potential(dim, {}, horizon);
}

// The forced quadratic problem u'' = u + cos t has the exact discrete
// periodic solution u_i = a_h cos t_i; on the continuum a = -1/2.
DiscreteProblem forced_quadratic(int nodes) {
  std::vector<PotentialTerm> terms;
  terms.push_back(PotentialTerm::smooth_term(one, quadratic()));
  SmoothSpatial lin;
  lin.value = [](ConstVecRef x) { return x(0); };
  lin.grad = [](ConstVecRef x) { return Vec(Vec::Ones(x.size())); };
  terms.push_back(PotentialTerm::smooth_term(
      [](double t) { return std::cos(t); }, lin));
  Potential F(1, std::move(terms), 2.0 * kPi);
  SolverOptions opt;
  opt.restarts = 4;
  return DiscreteProblem(GFunction::power(2.0, 1), std::move(F), 2.0 * kPi,
                         nodes, opt);
}

Trajectory analytic_cos(int nodes) {
  return Trajectory::sample(2.0 * kPi, nodes, 1, [](double t) {
    Vec v(1);
    v << -0.5 * std::cos(t);
    return v;
  });
}

Trajectory random_trajectory(Sampler& s, double period, int nodes, int dim,
                             double scale) {
  Mat vals(nodes, dim);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < dim; ++j) vals(i, j) = s.uniform(-scale, scale);
  return Trajectory(period, std::move(vals));
}

}  // namespace

TEST_CASE("action of a constant is the potential integral") {
  std::vector<PotentialTerm> terms;
  terms.push_back(PotentialTerm::smooth_term(
      [](double t) { return 1.0 + std::sin(t); }, quadratic()));
  Potential F(2, std::move(terms), 2.0 * kPi);
  DiscreteProblem prob(GFunction::power(3.0, 2), std::move(F), 2.0 * kPi, 64);

  Vec c(2);
  c << 1.0, -2.0;
  Trajectory u = Trajectory::constant(2.0 * kPi, 64, c);
  double expect = 0.0;
  for (int i = 0; i < 64; ++i)
    expect += prob.h() * (1.0 + std::sin(prob.time(i))) * 0.5 * c.squaredNorm();
  CHECK(action(prob, u) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("kinetic action of a sine approximates its integral") {
  DiscreteProblem prob(GFunction::power(2.0, 1), empty_potential(1),
                       2.0 * kPi, 512);
  Trajectory u = Trajectory::sample(2.0 * kPi, 512, 1, [](double t) {
    Vec v(1);
    v << std::sin(t);
    return v;
  });
  // int cos^2 / 2 = pi/2; forward differences shift this by O(h^2).
  CHECK(action(prob, u) == doctest::Approx(kPi / 2.0).epsilon(1e-2));
}

TEST_CASE("zero trajectory has zero action for the kink potential") {
  std::vector<PotentialTerm> terms;
  terms.push_back(PotentialTerm::abs_term(one, {0}));
  Potential F(1, std::move(terms), 2.0 * kPi);
  DiscreteProblem prob(GFunction::power(2.0, 1), std::move(F), 2.0 * kPi, 64);
  Trajectory zero = Trajectory::constant(2.0 * kPi, 64, Vec::Zero(1));
  CHECK(action(prob, zero) == 0.0);
  ResidualStats st = el_residual(prob, zero);
  CHECK(st.max == 0.0);
  CHECK(st.mean_condition == 0.0);
}

TEST_CASE("subgradient matches finite differences on smooth problems") {
  DiscreteProblem prob = forced_quadratic(32);
  Sampler s(21);
  Trajectory u = random_trajectory(s, 2.0 * kPi, 32, 1, 2.0);
  Mat g = action_subgradient(prob, u);
  REQUIRE(g.rows() == 32);
  REQUIRE(g.cols() == 1);
  for (int i = 0; i < 32; i += 3) {
    Trajectory up = u, um = u;
    const double step = 1e-6;
    up.values()(i, 0) += step;
    um.values()(i, 0) -= step;
    const double fd = (action(prob, up) - action(prob, um)) / (2.0 * step);
    CHECK(g(i, 0) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("subgradient of a constant reduces to the potential gradient") {
  DiscreteProblem prob = forced_quadratic(16);
  Vec c(1);
  c << 0.7;
  Trajectory u = Trajectory::constant(2.0 * kPi, 16, c);
  Mat g = action_subgradient(prob, u);
  for (int i = 0; i < 16; ++i) {
    const double expect = prob.h() * (0.7 + std::cos(prob.time(i)));
    CHECK(g(i, 0) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("discrete integration by parts holds to machine precision") {
  GFunction phi = GFunction::power(3.0, 2);
  Sampler s(23);
  for (int k = 0; k < 10; ++k) {
    const int n = 16 + 8 * k;
    Trajectory u = random_trajectory(s, 2.0, n, 2, 2.0);
    Trajectory v = random_trajectory(s, 2.0, n, 2, 2.0);
    Trajectory du = u.derivative();
    Trajectory dv = v.derivative();
    const double h = u.h();
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      Vec w = phi.gradient(du.node(i));
      Vec wm = phi.gradient(du.node((i + n - 1) % n));
      lhs += h * w.dot(dv.node(i));
      rhs -= h * ((w - wm) / h).dot(v.node(i));
      scale += std::abs(lhs) + std::abs(rhs);
    }
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + scale));
  }
}

TEST_CASE("residual of the analytic solution shrinks quadratically") {
  double prev = kInf;
  for (int n : {64, 128, 256, 512}) {
    DiscreteProblem prob = forced_quadratic(n);
    ResidualStats st = el_residual(prob, analytic_cos(n));
    CHECK(st.max < prev);
    prev = st.max;
  }
  // At N = 512 the O(h^2) truncation is far below the solver tolerance.
  DiscreteProblem prob = forced_quadratic(512);
  CHECK(el_residual(prob, analytic_cos(512)).max <= 1e-3);
}

TEST_CASE("el_residual matches its definition on smooth problems") {
  DiscreteProblem prob = forced_quadratic(24);
  Sampler s(29);
  Trajectory u = random_trajectory(s, 2.0 * kPi, 24, 1, 1.5);
  Trajectory du = u.derivative();
  ResidualStats st = el_residual(prob, u);
  REQUIRE(st.per_node.size() == 24);
  const double h = prob.h();
  for (int i = 0; i < 24; ++i) {
    const double w = du.node(i)(0);
    const double wm = du.node((i + 23) % 24)(0);
    const double r = (w - wm) / h;
    const double grad = u.node(i)(0) + std::cos(prob.time(i));
    CHECK(st.per_node(i) == doctest::Approx(std::abs(r - grad)).epsilon(1e-10));
  }
  CHECK(st.max == doctest::Approx(st.per_node.maxCoeff()).epsilon(1e-14));
}

TEST_CASE("solver reaches the analytic solution of the forced quadratic") {
  DiscreteProblem prob = forced_quadratic(256);
  SolveResult res = minimize(prob);
  CHECK(res.converged);
  const Trajectory exact = analytic_cos(256);
  const double err =
      (res.u.values() - exact.values()).cwiseAbs().maxCoeff();
  CHECK(err <= 5e-3);
  CHECK(res.stats.max <= prob.options().tol_residual);
  CHECK(res.stats.mean_condition <= prob.options().tol_mean);
  VerifyReport rep = verify_solution(prob, res.u);
  CHECK(rep.verified);
  CHECK(rep.residual_ok);
  CHECK(rep.mean_ok);
  CHECK(rep.strictly_convex);
}

TEST_CASE("kink potential snaps the minimizer to zero") {
  std::vector<PotentialTerm> terms;
  terms.push_back(PotentialTerm::abs_term(one, {0}));
  Potential F(1, std::move(terms), 2.0 * kPi);
  SolverOptions opt;
  opt.restarts = 4;
  DiscreteProblem prob(GFunction::power(2.0, 1), std::move(F), 2.0 * kPi, 64,
                       opt);
  SolveResult res = minimize(prob);
  CHECK(res.converged);
  CHECK(res.u.values().cwiseAbs().maxCoeff() <= 1e-2);
  // The snapped iterate sits exactly on the kink where 0 is in the
  // subdifferential: the residual vanishes identically.
  CHECK(res.stats.max == 0.0);
  CHECK(res.action_value == doctest::Approx(0.0));
}

TEST_CASE("convex problems give the same value from any start") {
  DiscreteProblem prob = forced_quadratic(64);
  SolveResult a = minimize(prob);
  prob.options().seed = 999;
  SolveResult b = minimize(prob);
  CHECK(a.action_value == doctest::Approx(b.action_value).epsilon(1e-6));

  Sampler s(31);
  SolveResult warm = minimize(prob, random_trajectory(s, 2.0 * kPi, 64, 1, 3.0));
  CHECK(warm.action_value == doctest::Approx(a.action_value).epsilon(1e-6));
}

TEST_CASE("minimize is deterministic for a fixed seed") {
  DiscreteProblem prob = forced_quadratic(64);
  SolveResult a = minimize(prob);
  SolveResult b = minimize(prob);
  CHECK(a.action_value == b.action_value);
  CHECK(a.iterations == b.iterations);
  CHECK((a.u.values() - b.u.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate kinetic term still meets the residual target") {
  // phi = |y|^3/3 makes grad phi flat near zero slope; the plateau window
  // must not cut the descent short.
  std::vector<PotentialTerm> terms;
  terms.push_back(PotentialTerm::smooth_term(one, quadratic()));
  Potential F(1, std::move(terms), 2.0 * kPi);
  SolverOptions opt;
  opt.restarts = 2;
  DiscreteProblem prob(GFunction::power(3.0, 1), std::move(F), 2.0 * kPi, 64,
                       opt);
  SolveResult res = minimize(prob);
  CHECK(res.converged);
  CHECK(res.stats.max <= prob.options().tol_residual);
}

TEST_CASE("tiny iteration budgets exhaust without converging") {
  // A quartic potential keeps the curvature state-dependent, so three
  // descent steps cannot reach the residual tolerance from any start.  (The
  // forced quadratic would be too easy: from the zero start its gradient is
  // a single circulant eigenvector and one line search nails it.)
  SmoothSpatial quart;
  quart.value = [](ConstVecRef x) {
    const double s = x.squaredNorm();
    return 0.25 * s * s;
  };
  quart.grad = [](ConstVecRef x) { return Vec(x.squaredNorm() * x); };
  SmoothSpatial lin;
  lin.value = [](ConstVecRef x) { return x(0); };
  lin.grad = [](ConstVecRef x) { return Vec(Vec::Ones(x.size())); };
  std::vector<PotentialTerm> terms;
  terms.push_back(PotentialTerm::smooth_term(one, quart));
  terms.push_back(PotentialTerm::smooth_term(
      [](double t) { return std::cos(t); }, lin));
  Potential F(1, std::move(terms), 2.0 * kPi);
  SolverOptions opt;
  opt.restarts = 4;
  DiscreteProblem prob(GFunction::power(2.0, 1), std::move(F), 2.0 * kPi, 64,
                       opt);
  prob.options().max_iterations = 3;
  SolveResult res = minimize(prob);
  CHECK(!res.converged);
  CHECK(res.iterations <= 3 * prob.options().restarts + 8);
}

TEST_CASE("problem construction validates nodes and dimensions") {
  CHECK_THROWS_AS(DiscreteProblem(GFunction::power(2.0, 1),
                                  empty_potential(1), 2.0 * kPi, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscreteProblem(GFunction::power(2.0, 1),
                                  empty_potential(2), 2.0 * kPi, 16),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscreteProblem(GFunction::power(2.0, 1),
                                  empty_potential(1), -1.0, 16),
                  std::invalid_argument);
}

TEST_CASE("action and residual reject mismatched trajectories") {
  DiscreteProblem prob = forced_quadratic(16);
  Trajectory wrong_nodes = Trajectory::constant(2.0 * kPi, 8, Vec::Zero(1));
  CHECK_THROWS_AS(action(prob, wrong_nodes), std::invalid_argument);
  Trajectory wrong_dim = Trajectory::constant(2.0 * kPi, 16, Vec::Zero(2));
  CHECK_THROWS_AS(el_residual(prob, wrong_dim), std::invalid_argument);
}

TEST_CASE("autonomous problems are shift invariant in the action") {
  std::vector<PotentialTerm> terms;
  terms.push_back(PotentialTerm::smooth_term(one, quadratic()));
  Potential F(1, std::move(terms), 2.0 * kPi);
  DiscreteProblem prob(GFunction::power(2.0, 1), std::move(F), 2.0 * kPi, 32);
  Sampler s(41);
  Trajectory u = random_trajectory(s, 2.0 * kPi, 32, 1, 2.0);
  Mat shifted(32, 1);
  for (int i = 0; i < 32; ++i) shifted.row(i) = u.values().row((i + 7) % 32);
  Trajectory v(2.0 * kPi, std::move(shifted));
  CHECK(action(prob, v) ==
        doctest::Approx(action(prob, u)).epsilon(1e-12));
}
