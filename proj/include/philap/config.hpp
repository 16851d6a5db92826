#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "philap/gfunction.hpp"
#include "philap/potential.hpp"
#include "philap/probes.hpp"
#include "philap/problem.hpp"

namespace philap {

// Flat key-value problem description with dotted section keys.  Lines are
// `key = value`, '#' starts a comment, blank lines ignored.  serialize()
// emits sorted keys with trimmed values, so parse(serialize()) is the
// identity.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config load_file(const std::string& path);
  std::string serialize() const;

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  // Numeric fields accept constant expressions ("13/6", "2*pi").
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  std::vector<double> number_list(const std::string& key) const;
  std::vector<int> int_list(const std::string& key) const;
  void set(const std::string& key, std::string value);

  const std::map<std::string, std::string>& entries() const { return kv_; }
  // Number of consecutive indices k for which `prefix.k.kind` exists.
  int count_terms(const std::string& prefix) const;

 private:
  std::map<std::string, std::string> kv_;
};

// Reads `prefix.family` plus its parameters (p, dimension, exponents, dims).
FamilyDescriptor parse_family(const Config& cfg, const std::string& prefix);
GFunction build_gfunction(const Config& cfg, const std::string& prefix);

// Builds the potential from `potential.term.K.*` entries.  Spatial kinds:
// gfunc (nested descriptor under .phi), power (|x_B|^exponent, exponent > 1),
// abs (|x_B|), linear (<vector, x>), coord_product (x_i x_j), constant,
// max_affine (pieces of <vector, x> + offset).  Each term takes a time
// coefficient expression under .coef (default "1").
Potential build_potential(const Config& cfg, int dimension, double period);

struct ProblemSetup {
  explicit ProblemSetup(GFunction phi_in) : phi(std::move(phi_in)) {}

  GFunction phi;
  std::optional<GFunction> phi0;
  std::optional<Potential> F;
  double period = 2.0 * kPi;
  int nodes = 256;
  SolverOptions solver;
  ProbeParams probes;
  TimeFn b, d;
  std::string b_text, d_text;
  std::optional<double> lambda, mu;
  std::optional<double> pasca_p, pasca_q;
  std::vector<double> pasca_alphas;
};

// Assembles every section present in the config; throws
// std::invalid_argument on inconsistent or malformed entries.
ProblemSetup build_problem(const Config& cfg);

}  // namespace philap
