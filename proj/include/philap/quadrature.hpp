#pragma once

#include <functional>

namespace philap {

// Adaptive Simpson rule on [a, b].  The effective tolerance is
// max(abs_tol, 1e-14 * |I|): a pure absolute tolerance is unattainable once
// the integral itself exceeds ~1e4 in magnitude.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 52);

}  // namespace philap
