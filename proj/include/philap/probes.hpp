#pragma once

#include "philap/common.hpp"
#include "philap/gfunction.hpp"
#include "philap/potential.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace philap {

enum class ProbeStatus { pass, fail, not_probed };

const char* to_string(ProbeStatus s);

// A fail witness carries enough data to re-evaluate the violated inequality
// independently; unused slots stay empty.
struct ProbeWitness {
  double t = 0.0;
  Vec x;
  Vec y;
  Vec xi;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string note;
};

struct ProbeResult {
  std::string name;
  ProbeStatus status = ProbeStatus::not_probed;
  std::optional<ProbeWitness> witness;
  // (radius, value) rows for trend-style probes.
  std::vector<std::pair<double, double>> trend;
  std::vector<std::pair<std::string, double>> meta;
  bool strong = false;
  std::string summary;
};

// Sample scale shared by the probes.  Probes are falsifiers: "pass" means no
// counterexample was found at this scale.
struct ProbeParams {
  double period = 2.0 * kPi;
  double radius = 1e3;
  int samples = 240;        // spatial points per probe
  int time_samples = 32;    // uniform time points (clusters near 0 added)
  int pair_samples = 100000;  // difference-quotient pairs per time sample
  std::vector<double> radii;  // trend ladder; decades of `radius` when empty
  std::vector<int> pasca_block1, pasca_block2;  // default: halves of 1..n
  std::uint64_t seed = 2026;
};

std::vector<double> decade_ladder(double lo, double hi);

// H1: phi strictly convex, phi and phi* doubling.
ProbeResult probe_h1(const GFunction& phi, const ProbeParams& params);
// H2: finite values and finite local difference quotients (regularity itself
// holds by construction).
ProbeResult probe_h2(const Potential& F, const ProbeParams& params);
// H3: |F(t,x)| + max|xi| <= c(x) b(t); the envelope c is built empirically
// and must stay stable under time-grid refinement; b must have a finite tail
// integral near 0.
ProbeResult probe_h3(const Potential& F, const TimeFn& b,
                     const ProbeParams& params);
// H4: phi*(xi/d(t)) <= phi0(x) + 1 for extreme xi of the subdifferential.
ProbeResult probe_h4(const Potential& F, const GFunction& phi,
                     const GFunction& phi0, const TimeFn& d,
                     const ProbeParams& params);
// H5: m(R) = min over directions of int_0^T F(t,x)dt / phi0(2x) at |x|=R
// must grow through the radius ladder (>=4 increasing consecutive decades
// and final > 10x first).
ProbeResult probe_h5(const Potential& F, const GFunction& phi0,
                     const ProbeParams& params);
// H6: F(t, lambda(x+y)) <= mu (F(t,x) + F(t,y)).
ProbeResult probe_h6(const Potential& F, double lambda, double mu,
                     const ProbeParams& params);
// H7: F(t,x) <= b(t) (phi0(x) + 1).
ProbeResult probe_h7(const Potential& F, const GFunction& phi0,
                     const TimeFn& b, const ProbeParams& params);
// H8: same trend machinery as H5 with phi0 replaced by the constant 1.
ProbeResult probe_h8(const Potential& F, const ProbeParams& params);
// H9: pair-sampled estimate of sup |F(t,x)-F(t,y)| / (1 + |x-y|) compared
// against b(t).
ProbeResult probe_h9(const Potential& F, const TimeFn& b,
                     const ProbeParams& params);

struct PascaReport {
  ProbeResult pasca1, pasca2, pasca3;
};

// Prior-work growth conditions for two-block systems: |zeta_i| <=
// c_i1 |x_i|^alpha + c_i2 with zeta_i the block component of the
// subdifferential (constants fitted at small opposite-block radius, then
// challenged at large one), plus the companion coercivity trend with
// denominator |x_1|^{p' alpha} + |x_2|^{q' alpha}.
PascaReport probe_pasca(const Potential& F, double p, double q,
                        const std::vector<double>& alphas, double radius,
                        const ProbeParams& params);

struct SuiteInputs {
  const GFunction* phi = nullptr;   // enables H1, H4
  const GFunction* phi0 = nullptr;  // enables H4, H5, H7
  const Potential* F = nullptr;     // enables H2..H9, pasca
  TimeFn b;                         // enables H3, H7, H9
  TimeFn d;                         // enables H4
  std::optional<double> lambda, mu;  // enables H6
  std::optional<double> pasca_p, pasca_q;
  std::vector<double> pasca_alphas;
  ProbeParams params;
};

struct HypothesisReport {
  std::vector<ProbeResult> entries;  // H1..H9, pasca1..pasca3, in order
  // The theorems whose full hypothesis list passed.
  std::vector<std::string> theorems_passing;
};

const ProbeResult* find_entry(const HypothesisReport& report,
                              const std::string& name);

// Runs every probe whose inputs are present (others report not_probed) and
// grants theorem verdicts: theorem1 needs H1-H5, theorem2 needs H1-H3 and
// H6-H8, theorem3 needs H1-H3, H8, H9 and an N-function phi.
HypothesisReport run_hypothesis_suite(const SuiteInputs& in);

}  // namespace philap
