#pragma once

#include "philap/common.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace philap {

// Scalar convex profile psi on [0, inf) with psi(0) = 0; a radial function
// phi(x) = psi(|x|) is determined by it.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> deriv;  // psi', nondecreasing
  // Analytic Legendre transform, when known: conj->value(s) = psi*(s) and
  // conj->deriv(s) = argmax_r (s r - psi(r)).
  std::shared_ptr<const RadialProfile> conj;
};

enum class GStructure { radial, block_separable, general };

struct GFlags {
  bool strictly_convex = true;
  bool n_function = true;
};

// Even convex function with phi(0) = 0 growing to infinity, together with the
// structural data the numeric routines exploit (radial profile or separable
// blocks).  Gradients of the built-in families are exact.
class GFunction {
 public:
  struct Component {
    int offset = 0;
    int dim = 0;
    RadialProfile psi;
  };

  int dimension() const { return dim_; }
  GStructure structure() const { return structure_; }
  const std::string& family() const { return family_; }
  bool strictly_convex() const { return flags_.strictly_convex; }
  bool is_n_function() const { return flags_.n_function; }

  double value(ConstVecRef x) const;
  double operator()(ConstVecRef x) const { return value(x); }
  Vec gradient(ConstVecRef x) const;

  // Radial structure only.
  const RadialProfile& profile() const;
  // Block structure only.
  const std::vector<Component>& components() const;

  bool has_analytic_conjugate() const;
  // Analytic conjugate for the general structure, if supplied.
  const std::function<double(ConstVecRef)>& general_conjugate() const {
    return general_conj_;
  }

  // |x|^p / p, p > 1.
  static GFunction power(double p, int dim);
  // Separable sum of per-block powers |x_Bj|^{p_j} / p_j.
  static GFunction block(const std::vector<double>& exponents,
                         const std::vector<int>& dims);
  // Radial profile integral_0^r s^{p-1} / log(s^2 + e) ds, evaluated by
  // adaptive quadrature; rejects p for which the profile is not convex.
  static GFunction log_tempered(double p, int dim = 1);
  // Radial profile r^p / (q log(r^2 + e)^q), q = p / (p - 1), capped by a
  // matching quadratic below the radius where the profile turns convex.
  static GFunction log_damped_companion(double p, int dim = 1);

  static GFunction custom_radial(std::string name, int dim, RadialProfile psi,
                                 GFlags flags);
  // Block-separable function from explicit per-block profiles; components
  // must tile 0..dim-1 in order.
  static GFunction custom_block(std::string name, int dim,
                                std::vector<Component> components,
                                GFlags flags);
  static GFunction custom(std::string name, int dim,
                          std::function<double(ConstVecRef)> value,
                          std::function<Vec(ConstVecRef)> grad, GFlags flags,
                          std::function<double(ConstVecRef)> conj = nullptr);

 private:
  GFunction() = default;

  int dim_ = 0;
  GStructure structure_ = GStructure::general;
  GFlags flags_;
  std::string family_;
  RadialProfile psi_;                    // radial
  std::vector<Component> components_;    // block_separable
  std::function<double(ConstVecRef)> eval_;  // general
  std::function<Vec(ConstVecRef)> grad_;     // general
  std::function<double(ConstVecRef)> general_conj_;
};

struct FamilyDescriptor {
  std::string family;  // power | block | log_tempered | log_damped_companion
  double p = 2.0;
  std::vector<double> exponents;  // block only
  std::vector<int> block_dims;    // block only
  int dimension = 1;
};

// Builds a family from its descriptor.  Throws std::invalid_argument on bad
// parameters (p <= 1, inconsistent block dims, non-convex profile).
GFunction make_family(const FamilyDescriptor& d);

// Wraps user callables after a sampled structural validation (evenness,
// convexity, phi(0) = 0, nonnegativity, growth consistent with the flags);
// throws std::invalid_argument naming the witness point on failure.
GFunction make_custom(std::string name, int dim,
                      std::function<double(ConstVecRef)> value,
                      std::function<Vec(ConstVecRef)> grad, GFlags flags,
                      std::uint64_t seed = 7);

// The sampled validation itself; returns a description of the first violated
// property together with the witness point, or nullopt if none was found.
std::optional<std::string> validate_gfunction(const GFunction& f,
                                              std::uint64_t seed,
                                              int samples = 200);

}  // namespace philap
