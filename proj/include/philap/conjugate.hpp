#pragma once

#include "philap/gfunction.hpp"

#include <utility>

namespace philap {

struct ConjugateResult {
  double value = 0.0;  // +inf when the supremum diverges
  Vec maximizer;       // argmax x; zero vector when xi = 0, empty if infinite
  bool finite = true;
};

// sup_x <xi, x> - phi(x).  Uses the analytic transform when the family
// carries one; otherwise reduces radial/block structure to 1D concave
// maximization (golden section plus Newton polish on psi'(r) = s) and falls
// back to gradient ascent for general structure.  A diverging supremum is
// reported through finite = false, value = +inf.
ConjugateResult conjugate(const GFunction& phi, ConstVecRef xi);

// Same, but never takes the analytic shortcut.  Used to cross-check the
// numeric path against closed forms.
ConjugateResult conjugate_numeric(const GFunction& phi, ConstVecRef xi);

// phi(x) + phi*(xi) - <xi, x>; nonnegative up to the numeric-conjugate
// tolerance.
double fenchel_young_gap(const GFunction& phi, ConstVecRef x, ConstVecRef xi);

// With g = grad phi(x), returns (phi(2x) - <g,x>, <g,x> - phi*(g)).  Both
// entries are nonnegative for a convex phi: the first bounds phi*(g) by
// phi(2x), the second is the Fenchel-Young equality residual at (x, g).
std::pair<double, double> gradient_conjugate_bound_check(const GFunction& phi,
                                                         ConstVecRef x);

// The conjugate as a GFunction, preserving radial/block structure (their
// conjugates are again radial/block).  Profile evaluations use the analytic
// transform when present, else the numeric 1D maximization; the profile
// derivative is the maximizer radius.
GFunction conjugate_function(const GFunction& phi);

// Numeric-only variant of the above (for involution checks).
GFunction conjugate_function_numeric(const GFunction& phi);

}  // namespace philap
