#include "philap/conjugate.hpp"

#include <cmath>
#include <stdexcept>

namespace philap {
namespace {

constexpr double kRadiusCap = 1e120;  // bracket expansion limit

struct Conj1D {
  double value = 0.0;
  double argmax = 0.0;
  bool finite = true;
};

// sup_{r >= 0} s r - psi(r) for a convex profile.  Localizes the concave
// maximum by golden section, then polishes the stationarity equation
// psi'(r) = s with secant steps guarded by the bracket.
Conj1D conjugate_profile_numeric(const RadialProfile& psi, double s) {
  if (s == 0.0) return {0.0, 0.0, true};

  auto m = [&](double r) { return s * r - psi.value(r); };

  // Expand until psi' exceeds s; failure to do so means linear-or-slower
  // growth along the ray, i.e. a diverging supremum.
  double hi = 1.0;
  while (psi.deriv(hi) < s) {
    hi *= 4.0;
    if (hi > kRadiusCap) return {kInf, 0.0, false};
    if (!std::isfinite(psi.value(hi))) break;  // slope is effectively infinite
  }
  double lo = 0.0;

  // Golden-section localization of the maximum of m on [lo, hi].
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = m(c), fd = m(d);
  for (int it = 0; it < 200 && (b - a) > 1e-10 * (1.0 + b); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = m(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = m(d);
    }
  }
  double r = 0.5 * (a + b);

  // Secant polish on psi'(r) - s = 0, clamped to [a0, b0] = original bracket.
  double r0 = std::max(0.0, 0.5 * r), r1 = r;
  double g0 = psi.deriv(r0) - s, g1 = psi.deriv(r1) - s;
  for (int it = 0; it < 60; ++it) {
    if (g1 == g0) break;
    double rn = r1 - g1 * (r1 - r0) / (g1 - g0);
    if (!(rn >= lo && rn <= hi)) break;
    r0 = r1;
    g0 = g1;
    r1 = rn;
    g1 = psi.deriv(r1) - s;
    if (std::abs(r1 - r0) <= 1e-14 * (1.0 + r1)) break;
  }
  if (std::isfinite(r1) && m(r1) >= m(r)) r = r1;

  return {m(r), r, true};
}

Conj1D conjugate_profile(const RadialProfile& psi, double s) {
  if (psi.conj) {
    return {psi.conj->value(s), psi.conj->deriv(s), true};
  }
  return conjugate_profile_numeric(psi, s);
}

// Gradient ascent with backtracking on g(x) = <xi,x> - phi(x), for general
// structure.  500 iterations; escape to huge radius reports divergence.
ConjugateResult conjugate_general(const GFunction& phi, ConstVecRef xi) {
  const int n = phi.dimension();
  Vec x = Vec::Zero(n);
  double gx = 0.0;  // g(0) = -phi(0) = 0
  double step = 1.0;
  for (int it = 0; it < 500; ++it) {
    Vec d = xi - phi.gradient(x);
    const double dn = d.norm();
    if (dn <= 1e-12 * (1.0 + xi.norm())) break;
    // Backtracking with a growing initial step.
    step *= 2.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vec xt = x + step * d;
      double gt = xi.dot(xt) - phi.value(xt);
      if (std::isfinite(gt) && gt > gx + 1e-4 * step * dn * dn) {
        x = std::move(xt);
        gx = gt;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if (x.norm() > 1e60) return {kInf, Vec(), false};
  }
  return {gx, x, true};
}

ConjugateResult conjugate_impl(const GFunction& phi, ConstVecRef xi,
                               bool allow_analytic) {
  if (xi.size() != phi.dimension())
    throw std::invalid_argument("conjugate: dimension mismatch");

  switch (phi.structure()) {
    case GStructure::radial: {
      const double s = xi.norm();
      const Conj1D c = allow_analytic ? conjugate_profile(phi.profile(), s)
                                      : conjugate_profile_numeric(
                                            phi.profile(), s);
      if (!c.finite) return {kInf, Vec(), false};
      Vec arg = Vec::Zero(xi.size());
      if (s > 0.0) arg = (c.argmax / s) * xi;
      return {c.value, arg, true};
    }
    case GStructure::block_separable: {
      double total = 0.0;
      Vec arg = Vec::Zero(xi.size());
      for (const auto& comp : phi.components()) {
        const auto seg = xi.segment(comp.offset, comp.dim);
        const double s = seg.norm();
        const Conj1D c = allow_analytic
                             ? conjugate_profile(comp.psi, s)
                             : conjugate_profile_numeric(comp.psi, s);
        if (!c.finite) return {kInf, Vec(), false};
        total += c.value;
        if (s > 0.0) arg.segment(comp.offset, comp.dim) = (c.argmax / s) * seg;
      }
      return {total, arg, true};
    }
    case GStructure::general: {
      if (allow_analytic && phi.general_conjugate()) {
        ConjugateResult r;
        r.value = phi.general_conjugate()(xi);
        r.finite = std::isfinite(r.value);
        return r;
      }
      return conjugate_general(phi, xi);
    }
  }
  return {};
}

}  // namespace

ConjugateResult conjugate(const GFunction& phi, ConstVecRef xi) {
  return conjugate_impl(phi, xi, true);
}

ConjugateResult conjugate_numeric(const GFunction& phi, ConstVecRef xi) {
  return conjugate_impl(phi, xi, false);
}

double fenchel_young_gap(const GFunction& phi, ConstVecRef x, ConstVecRef xi) {
  const ConjugateResult c = conjugate(phi, xi);
  if (!c.finite) return kInf;
  return phi.value(x) + c.value - xi.dot(x);
}

std::pair<double, double> gradient_conjugate_bound_check(const GFunction& phi,
                                                         ConstVecRef x) {
  const Vec g = phi.gradient(x);
  const double pairing = g.dot(x);
  const ConjugateResult c = conjugate(phi, g);
  const double conj_at_g = c.finite ? c.value : kInf;
  return {phi.value(2.0 * x) - pairing, pairing - conj_at_g};
}

namespace {

RadialProfile conjugate_profile_function(const RadialProfile& psi,
                                         bool allow_analytic) {
  if (allow_analytic && psi.conj) {
    RadialProfile out = *psi.conj;
    // The biconjugate of a closed convex profile is the profile itself.
    auto back = std::make_shared<RadialProfile>();
    back->value = psi.value;
    back->deriv = psi.deriv;
    out.conj = back;
    return out;
  }
  // Copy the callables so the returned profile owns its state.
  auto value = psi.value;
  auto deriv = psi.deriv;
  RadialProfile out;
  out.value = [value, deriv](double s) {
    return conjugate_profile_numeric({value, deriv, nullptr}, s).value;
  };
  out.deriv = [value, deriv](double s) {
    return conjugate_profile_numeric({value, deriv, nullptr}, s).argmax;
  };
  auto back = std::make_shared<RadialProfile>();
  back->value = value;
  back->deriv = deriv;
  out.conj = back;
  return out;
}

GFunction conjugate_function_impl(const GFunction& phi, bool allow_analytic) {
  const std::string name = phi.family() + "*";
  // Conjugates of our families keep strict convexity; the conjugate of an
  // n-function is again an n-function.
  GFlags flags{phi.strictly_convex(), phi.is_n_function()};
  switch (phi.structure()) {
    case GStructure::radial:
      return GFunction::custom_radial(
          name, phi.dimension(),
          conjugate_profile_function(phi.profile(), allow_analytic), flags);
    case GStructure::block_separable: {
      std::vector<GFunction::Component> conj_comps;
      for (const auto& c : phi.components()) {
        conj_comps.push_back(
            {c.offset, c.dim,
             conjugate_profile_function(c.psi, allow_analytic)});
      }
      return GFunction::custom_block(name, phi.dimension(),
                                     std::move(conj_comps), flags);
    }
    case GStructure::general: {
      auto evalf = [phi](ConstVecRef xi) {
        return conjugate_impl(phi, xi, true).value;
      };
      auto gradf = [phi](ConstVecRef xi) {
        ConjugateResult c = conjugate_impl(phi, xi, true);
        return c.finite && c.maximizer.size() ? c.maximizer
                                              : Vec::Zero(xi.size());
      };
      return GFunction::custom(name, phi.dimension(), evalf, gradf, flags);
    }
  }
  throw std::logic_error("conjugate_function: unreachable");
}

}  // namespace

GFunction conjugate_function(const GFunction& phi) {
  return conjugate_function_impl(phi, true);
}

GFunction conjugate_function_numeric(const GFunction& phi) {
  return conjugate_function_impl(phi, false);
}

}  // namespace philap
