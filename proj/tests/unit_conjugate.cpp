#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "philap/conjugate.hpp"
#include "philap/sampling.hpp"

#include <cmath>

using namespace philap;

namespace {

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

// Dense-grid lower bound for sup_x <xi, x> - phi(x) in 1D; independent of the
// library's maximizers.
double brute_force_conjugate_1d(const GFunction& phi, double xi, double radius,
                                int steps) {
  double best = 0.0;  // x = 0 is always admissible
  for (int i = -steps; i <= steps; ++i) {
    const double x = radius * i / steps;
    best = std::max(best, xi * x - phi(vec1(x)));
  }
  return best;
}

}  // namespace

TEST_CASE("numeric conjugate of powers matches the dual power") {
  Sampler s(31);
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const double pc = p / (p - 1.0);
    GFunction phi = GFunction::power(p, 2);
    for (int k = 0; k < 60; ++k) {
      Vec xi = s.log_point(2, 1e-2, 1e2);
      const double expect = std::pow(xi.norm(), pc) / pc;
      ConjugateResult num = conjugate_numeric(phi, xi);
      REQUIRE(num.finite);
      CHECK(num.value == doctest::Approx(expect).epsilon(1e-6));
      // The maximizer must realize the supremum it reports.
      CHECK(xi.dot(num.maximizer) - phi(num.maximizer) ==
            doctest::Approx(num.value).epsilon(1e-6));
      // The analytic path agrees.
      CHECK(conjugate(phi, xi).value ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("conjugate at zero is zero with zero maximizer") {
  GFunction phi = GFunction::power(3.0, 2);
  ConjugateResult r = conjugate(phi, Vec::Zero(2));
  CHECK(r.finite);
  CHECK(r.value == 0.0);
  CHECK(r.maximizer.norm() == 0.0);
}

TEST_CASE("block conjugate splits across blocks") {
  GFunction phi = GFunction::block({3.0, 2.0}, {1, 2});
  Vec xi(3);
  xi << 2.0, 1.0, -1.0;
  const double expect = std::pow(2.0, 1.5) / 1.5 +
                        std::pow(std::hypot(1.0, -1.0), 2.0) / 2.0;
  CHECK(conjugate(phi, xi).value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(conjugate_numeric(phi, xi).value ==
        doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("numeric conjugate dominates a dense grid search") {
  GFunction phi = GFunction::log_tempered(3.0, 1);
  for (double xi : {0.3, 1.0, 7.5, 40.0}) {
    const double grid = brute_force_conjugate_1d(phi, xi, 60.0, 40000);
    const double val = conjugate_numeric(phi, vec1(xi)).value;
    CHECK(val >= grid - 1e-7 * (1.0 + grid));
    CHECK(val <= grid + 1e-3 * (1.0 + grid));
  }
}

TEST_CASE("double conjugate recovers the power family") {
  GFunction phi = GFunction::power(3.0, 1);
  GFunction second = conjugate_function_numeric(conjugate_function_numeric(phi));
  Sampler s(33);
  for (int k = 0; k < 40; ++k) {
    Vec x = s.log_point(1, 1e-1, 1e2);
    CHECK(second(x) == doctest::Approx(phi(x)).epsilon(1e-5));
  }
}

TEST_CASE("fenchel young gap is nonnegative and tight at gradients") {
  Sampler s(37);
  std::vector<GFunction> pool;
  pool.push_back(GFunction::power(2.5, 2));
  pool.push_back(GFunction::block({2.0, 4.0}, {1, 1}));
  pool.push_back(GFunction::log_tempered(3.0, 2));
  for (const auto& phi : pool) {
    for (int k = 0; k < 100; ++k) {
      Vec x = s.log_point(phi.dimension(), 1e-2, 1e2);
      Vec xi = s.log_point(phi.dimension(), 1e-2, 1e2);
      CHECK(fenchel_young_gap(phi, x, xi) >= -1e-7);
      // Equality holds when xi = grad phi(x).
      Vec g = phi.gradient(x);
      const double gap = fenchel_young_gap(phi, x, g);
      CHECK(gap >= -1e-7);
      CHECK(gap <= 1e-5 * (1.0 + phi(x) + std::abs(g.dot(x))));
    }
  }
}

TEST_CASE("gradient conjugate bound check is nonnegative on samples") {
  Sampler s(41);
  GFunction phi = GFunction::power(3.0, 3);
  for (int k = 0; k < 100; ++k) {
    Vec x = s.log_point(3, 1e-2, 1e2);
    auto [upper_slack, fy_residual] = gradient_conjugate_bound_check(phi, x);
    CHECK(upper_slack >= -1e-9 * (1.0 + phi(2 * x)));
    CHECK(fy_residual >= -1e-7 * (1.0 + phi(x)));
  }
}

TEST_CASE("companion family equals the conjugate along the tempered gradient") {
  // With phi = |x|^3/3 the identity phi*(psi1'(r)) = psi0(r) holds exactly
  // beyond the companion's quadratic cap: both sides reduce to
  // (2/3) (r^2 / log(r^2+e))^{3/2}.
  GFunction phi = GFunction::power(3.0, 1);
  GFunction phi1 = GFunction::log_tempered(3.0, 1);
  GFunction phi0 = GFunction::log_damped_companion(3.0, 1);
  for (double r : {50.0, 1e2, 1e3, 1e5}) {
    const double slope = phi1.profile().deriv(r);
    const double lhs = conjugate(phi, vec1(slope)).value;
    const double rhs = phi0(vec1(r));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("linear growth makes the supremum diverge") {
  GFlags flags;
  flags.strictly_convex = false;
  flags.n_function = false;
  auto val = [](ConstVecRef x) { return x.norm(); };
  auto grad = [](ConstVecRef x) -> Vec {
    const double n = x.norm();
    if (n == 0.0) return Vec::Zero(x.size());
    return Vec(x / n);
  };
  GFunction abs = GFunction::custom("abs", 1, val, grad, flags);
  ConjugateResult inside = conjugate(abs, vec1(0.5));
  CHECK(inside.finite);
  CHECK(inside.value == doctest::Approx(0.0).epsilon(1e-9));
  ConjugateResult outside = conjugate(abs, vec1(2.0));
  CHECK(!outside.finite);
  CHECK(std::isinf(outside.value));
}

TEST_CASE("conjugate_function preserves structure") {
  GFunction phi = GFunction::block({3.0, 2.0}, {1, 2});
  GFunction conj = conjugate_function(phi);
  CHECK(conj.structure() == GStructure::block_separable);
  CHECK(conj.dimension() == 3);
  Vec xi(3);
  xi << 1.0, 2.0, 2.0;
  CHECK(conj(xi) == doctest::Approx(conjugate(phi, xi).value).epsilon(1e-10));

  GFunction rad = conjugate_function(GFunction::power(2.0, 2));
  CHECK(rad.structure() == GStructure::radial);
  Vec one = Vec::Ones(2);
  CHECK(rad(one) == doctest::Approx(1.0).epsilon(1e-10));
}
