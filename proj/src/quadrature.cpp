#include "philap/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace philap {
namespace {

struct Simpson {
  const std::function<double(double)>& f;

  static double rule(double fa, double fm, double fb, double len) {
    return len / 6.0 * (fa + 4.0 * fm + fb);
  }

  double recurse(double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = rule(fa, flm, fm, m - a);
    const double right = rule(fm, frm, fb, b - m);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
      return left + right + err / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = Simpson::rule(fa, fm, fb, b - a);
  const double tol = std::max(abs_tol, 1e-14 * std::abs(whole));
  Simpson s{f};
  return s.recurse(a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace philap
