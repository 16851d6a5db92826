#include "philap/gfunction.hpp"

#include "philap/quadrature.hpp"
#include "philap/sampling.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace philap {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Conjugate profile of a pure power r^p / p: s^{p'} / p' with
// argmax r = s^{1/(p-1)}.
std::shared_ptr<const RadialProfile> power_conj_profile(double p) {
  const double pc = p / (p - 1.0);
  auto conj = std::make_shared<RadialProfile>();
  conj->value = [pc](double s) { return std::pow(s, pc) / pc; };
  conj->deriv = [pc](double s) { return std::pow(s, pc - 1.0); };
  return conj;
}

RadialProfile power_profile(double p) {
  RadialProfile psi;
  psi.value = [p](double r) { return std::pow(r, p) / p; };
  psi.deriv = [p](double r) { return std::pow(r, p - 1.0); };
  psi.conj = power_conj_profile(p);
  return psi;
}

// Samples monotonicity of psi' on a log grid and returns the largest radius
// at which it was found decreasing (0 if the profile looks convex
// everywhere).  Uses the closed-form derivative: second differences of a
// quadrature-backed value would drown in the integration tolerance.
double convexity_threshold(const RadialProfile& psi) {
  const auto grid = log_grid(1e-4, 1e6, 600);
  double threshold = 0.0;
  for (double r : grid) {
    const double h = 1e-4 * r;
    const double dlo = psi.deriv(r - h);
    const double dhi = psi.deriv(r + h);
    if (dhi < dlo - 1e-11 * (std::abs(dlo) + std::abs(dhi))) threshold = r;
  }
  return threshold;
}

}  // namespace

double GFunction::value(ConstVecRef x) const {
  switch (structure_) {
    case GStructure::radial:
      return psi_.value(x.norm());
    case GStructure::block_separable: {
      double s = 0.0;
      for (const auto& c : components_)
        s += c.psi.value(x.segment(c.offset, c.dim).norm());
      return s;
    }
    case GStructure::general:
      return eval_(x);
  }
  return 0.0;
}

Vec GFunction::gradient(ConstVecRef x) const {
  switch (structure_) {
    case GStructure::radial: {
      const double r = x.norm();
      if (r == 0.0) return Vec::Zero(dim_);
      return (psi_.deriv(r) / r) * x;
    }
    case GStructure::block_separable: {
      Vec g = Vec::Zero(dim_);
      for (const auto& c : components_) {
        const double r = x.segment(c.offset, c.dim).norm();
        if (r > 0.0)
          g.segment(c.offset, c.dim) =
              (c.psi.deriv(r) / r) * x.segment(c.offset, c.dim);
      }
      return g;
    }
    case GStructure::general:
      return grad_(x);
  }
  return Vec::Zero(dim_);
}

const RadialProfile& GFunction::profile() const {
  if (structure_ != GStructure::radial)
    throw std::logic_error("profile(): function is not radial");
  return psi_;
}

const std::vector<GFunction::Component>& GFunction::components() const {
  if (structure_ != GStructure::block_separable)
    throw std::logic_error("components(): function is not block separable");
  return components_;
}

bool GFunction::has_analytic_conjugate() const {
  switch (structure_) {
    case GStructure::radial:
      return psi_.conj != nullptr;
    case GStructure::block_separable: {
      for (const auto& c : components_)
        if (!c.psi.conj) return false;
      return true;
    }
    case GStructure::general:
      return static_cast<bool>(general_conj_);
  }
  return false;
}

GFunction GFunction::power(double p, int dim) {
  require(p > 1.0, "power: exponent must exceed 1");
  require(dim >= 1, "power: dimension must be positive");
  GFunction f;
  f.dim_ = dim;
  f.structure_ = GStructure::radial;
  f.family_ = "power";
  f.flags_ = {true, true};
  f.psi_ = power_profile(p);
  return f;
}

GFunction GFunction::block(const std::vector<double>& exponents,
                           const std::vector<int>& dims) {
  require(!exponents.empty() && exponents.size() == dims.size(),
          "block: exponent and dimension lists must match and be non-empty");
  GFunction f;
  f.structure_ = GStructure::block_separable;
  f.family_ = "block";
  f.flags_ = {true, true};
  int offset = 0;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    require(exponents[j] > 1.0, "block: every exponent must exceed 1");
    require(dims[j] >= 1, "block: every block dimension must be positive");
    f.components_.push_back({offset, dims[j], power_profile(exponents[j])});
    offset += dims[j];
  }
  f.dim_ = offset;
  return f;
}

GFunction GFunction::log_tempered(double p, int dim) {
  require(p > 1.0, "log_tempered: exponent must exceed 1");
  require(dim >= 1, "log_tempered: dimension must be positive");
  const double e = std::exp(1.0);
  auto integrand = [p, e](double s) {
    return std::pow(s, p - 1.0) / std::log(s * s + e);
  };
  RadialProfile psi;
  psi.value = [integrand](double r) {
    if (r == 0.0) return 0.0;
    return integrate(integrand, 0.0, r, 1e-10);
  };
  psi.deriv = integrand;
  // The profile is convex only for p above ~1.64; reject otherwise with the
  // witness radius, matching the custom-family validation contract.
  const double bad = convexity_threshold(psi);
  if (bad > 0.0) {
    std::ostringstream os;
    os << "log_tempered: profile not convex for p = " << p
       << " (negative curvature near r = " << bad << ")";
    throw std::invalid_argument(os.str());
  }
  GFunction f;
  f.dim_ = dim;
  f.structure_ = GStructure::radial;
  f.family_ = "log_tempered";
  f.flags_ = {true, true};
  f.psi_ = std::move(psi);
  return f;
}

GFunction GFunction::log_damped_companion(double p, int dim) {
  require(p > 1.0, "log_damped_companion: exponent must exceed 1");
  require(dim >= 1, "log_damped_companion: dimension must be positive");
  const double q = p / (p - 1.0);
  const double e = std::exp(1.0);
  auto raw_value = [p, q, e](double r) {
    if (r == 0.0) return 0.0;
    return std::pow(r, p) / (q * std::pow(std::log(r * r + e), q));
  };
  auto raw_deriv = [p, q, e, raw_value](double r) {
    if (r == 0.0) return 0.0;
    const double L = std::log(r * r + e);
    // d/dr [r^p / (q L^q)] = r^{p-1} (p - 2 q r^2 / ((r^2+e) L)) / (q L^q)
    return raw_value(r) / r * (p - 2.0 * q * r * r / ((r * r + e) * L));
  };
  RadialProfile raw{raw_value, raw_deriv, nullptr};
  const double x0 = convexity_threshold(raw);
  RadialProfile psi;
  if (x0 == 0.0) {
    psi = std::move(raw);
  } else {
    // Quadratic cap below the seam matching the value; the derivative may
    // jump up at the seam, which keeps convexity.  Superlinear growth at
    // infinity and the n-function behaviour at 0 are unaffected.  The seam
    // is pushed outward until the one-sided derivatives are ordered.
    double cap_radius = 1.25 * x0;  // margin over the sampled threshold
    double alpha = raw_value(cap_radius) / (cap_radius * cap_radius);
    while (2.0 * alpha * cap_radius >
           raw_deriv(cap_radius) * (1.0 + 1e-12)) {
      cap_radius *= 1.5;
      alpha = raw_value(cap_radius) / (cap_radius * cap_radius);
    }
    psi.value = [raw_value, cap_radius, alpha](double r) {
      return r < cap_radius ? alpha * r * r : raw_value(r);
    };
    psi.deriv = [raw_deriv, cap_radius, alpha](double r) {
      return r < cap_radius ? 2.0 * alpha * r : raw_deriv(r);
    };
  }
  GFunction f;
  f.dim_ = dim;
  f.structure_ = GStructure::radial;
  f.family_ = "log_damped_companion";
  f.flags_ = {true, true};
  f.psi_ = std::move(psi);
  return f;
}

GFunction GFunction::custom_radial(std::string name, int dim,
                                   RadialProfile psi, GFlags flags) {
  require(dim >= 1, "custom_radial: dimension must be positive");
  GFunction f;
  f.dim_ = dim;
  f.structure_ = GStructure::radial;
  f.family_ = std::move(name);
  f.flags_ = flags;
  f.psi_ = std::move(psi);
  return f;
}

GFunction GFunction::custom_block(std::string name, int dim,
                                  std::vector<Component> components,
                                  GFlags flags) {
  int offset = 0;
  for (const auto& c : components) {
    require(c.offset == offset && c.dim >= 1,
            "custom_block: components must tile the coordinates in order");
    offset += c.dim;
  }
  require(offset == dim, "custom_block: components must cover the dimension");
  GFunction f;
  f.dim_ = dim;
  f.structure_ = GStructure::block_separable;
  f.family_ = std::move(name);
  f.flags_ = flags;
  f.components_ = std::move(components);
  return f;
}

GFunction GFunction::custom(std::string name, int dim,
                            std::function<double(ConstVecRef)> value,
                            std::function<Vec(ConstVecRef)> grad, GFlags flags,
                            std::function<double(ConstVecRef)> conj) {
  require(dim >= 1, "custom: dimension must be positive");
  GFunction f;
  f.dim_ = dim;
  f.structure_ = GStructure::general;
  f.family_ = std::move(name);
  f.flags_ = flags;
  f.eval_ = std::move(value);
  f.grad_ = std::move(grad);
  f.general_conj_ = std::move(conj);
  return f;
}

GFunction make_family(const FamilyDescriptor& d) {
  if (d.family == "power") return GFunction::power(d.p, d.dimension);
  if (d.family == "block") return GFunction::block(d.exponents, d.block_dims);
  if (d.family == "log_tempered")
    return GFunction::log_tempered(d.p, d.dimension);
  if (d.family == "log_damped_companion")
    return GFunction::log_damped_companion(d.p, d.dimension);
  throw std::invalid_argument("make_family: unknown family '" + d.family +
                              "'");
}

GFunction make_custom(std::string name, int dim,
                      std::function<double(ConstVecRef)> value,
                      std::function<Vec(ConstVecRef)> grad, GFlags flags,
                      std::uint64_t seed) {
  GFunction f = GFunction::custom(std::move(name), dim, std::move(value),
                                  std::move(grad), flags);
  if (auto bad = validate_gfunction(f, seed)) {
    throw std::invalid_argument("make_custom: " + *bad);
  }
  return f;
}

namespace {

std::string format_point(ConstVecRef x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

std::optional<std::string> validate_gfunction(const GFunction& f,
                                              std::uint64_t seed,
                                              int samples) {
  const int n = f.dimension();
  Sampler s(derive_seed(seed, "gfunction-validate"));

  const double at0 = f.value(Vec::Zero(n));
  if (!(std::abs(at0) <= 1e-12))
    return "value at the origin is " + std::to_string(at0) + ", expected 0";

  for (int k = 0; k < samples; ++k) {
    const Vec x = s.log_point(n, 1e-3, 1e3);
    const double fx = f.value(x);
    // Overflow to +inf at large radii is legitimate for fast-growing
    // functions; NaN, or infinity already at moderate radius, is not.
    if (std::isnan(fx) || (std::isinf(fx) && x.norm() <= 10.0))
      return "non-finite value at " + format_point(x);
    if (fx < -1e-12) return "negative value at " + format_point(x);
    const double fmx = f.value(-x);
    if (!(std::isinf(fx) && std::isinf(fmx)) &&
        std::abs(fx - fmx) > 1e-9 * (1.0 + std::abs(fx)))
      return "not even at " + format_point(x);

    const Vec y = s.log_point(n, 1e-3, 1e3);
    const double fy = f.value(y);
    const double fm = f.value(0.5 * (x + y));
    if (fm > 0.5 * (fx + fy) + 1e-9 * (1.0 + std::abs(fx) + std::abs(fy)))
      return "midpoint convexity fails at " + format_point(x) + " and " +
             format_point(y);

    const double lam = s.uniform(0.05, 0.95);
    if (std::isfinite(fx) &&
        f.value(lam * x) > lam * fx + 1e-9 * (1.0 + std::abs(fx)))
      return "phi(lambda x) <= lambda phi(x) fails at " + format_point(x);
  }

  if (f.is_n_function()) {
    // phi(x)/|x| must decay toward 0 and grow to infinity along sampled rays.
    const Vec d = s.direction(n);
    double prev = kInf;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double ratio = f.value(r * d) / r;
      if (ratio > prev * 1.01 + 1e-300)
        return "phi(x)/|x| fails to decay near 0 along " + format_point(d);
      prev = ratio;
    }
    double lo = f.value(1e1 * d) / 1e1;
    double hi = f.value(1e4 * d) / 1e4;
    if (!(hi > 10.0 * lo))
      return "phi(x)/|x| fails to grow at infinity along " + format_point(d);
  }
  return std::nullopt;
}

}  // namespace philap
