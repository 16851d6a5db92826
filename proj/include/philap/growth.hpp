#pragma once

#include "philap/gfunction.hpp"
#include "philap/trajectory.hpp"

#include <vector>

namespace philap {

struct GrowthReport {
  // max over sampled x != 0 of (phi(2x) - 1)/phi(x), clipped below at 1.
  double delta2_constant = 1.0;
  bool delta2_unbounded = false;
  Vec delta2_witness;
  // Scaling pair for phi(x) <= (1/(2 l)) phi(l x) + C with C ~ 0 at large
  // radius; l scanned over powers of two.
  int nabla2_l = 0;
  double nabla2_C = 0.0;
  bool nabla2_found = false;
  double radius = 0.0;
  int samples = 0;
  // Per-decade max of the delta2 ratio, for the unboundedness trend.
  std::vector<std::pair<double, double>> radius_trend;
};

// Sampled Delta2 / Nabla2 growth report.  samples >= 100 required.
GrowthReport delta2_report(const GFunction& phi, double radius, int samples,
                           std::uint64_t seed = 11);

struct OrderResult {
  bool ordered = false;
  double failing_k = 0.0;  // set when !ordered
  Vec witness_x;
  // Per-k smallest sampled radius beyond which phi0(x) <= phi1(k x) held.
  std::vector<std::pair<double, double>> thresholds;
};

// Sampled check of the ordering "phi0 grows essentially slower than phi1":
// for every k in k_grid there must be a radius R <= radius with
// phi0(x) <= phi1(k x) for all sampled |x| > R.
OrderResult order_llcurly(const GFunction& phi0, const GFunction& phi1,
                          const std::vector<double>& k_grid, double radius,
                          std::uint64_t seed = 13);

struct IndexEstimate {
  double alpha = 1.0;
  double beta = 1.0;
  double fit_residual_alpha = 0.0;
  double fit_residual_beta = 0.0;
  bool degenerate = false;  // residual above 0.1 or unusable fit
};

// Lower/upper scaling indices from slopes of ln M(lambda) / ln lambda, where
// M(lambda) = sup_u phi(lambda u)/phi(u) is maximized over a deterministic
// sample of u (radii 1e-3..1e3).  alpha uses lambda in 1e-6..1e-3, beta
// lambda in 1e3..1e6.
IndexEstimate matuszewska_indices(const GFunction& phi,
                                  std::uint64_t seed = 17);

struct Lemma52Report {
  struct Row {
    double norm = 0.0;
    double modular = 0.0;
    double ratio = 0.0;
  };
  std::vector<std::vector<Row>> trends;  // one trend per base trajectory
  bool pass = false;
  double mu = 0.0;
  double alpha_estimate = 0.0;
};

// Probes modular(u) / ||u||^mu along trajectories rescaled so the norm grows
// by x10 each step; the ratio must increase monotonically (>= 4 steps) when
// mu is below the lower index.  mu >= estimated alpha is rejected.
Lemma52Report lemma52_growth_probe(const GFunction& phi, double mu,
                                   const std::vector<Trajectory>& trajectories,
                                   int steps = 6);

}  // namespace philap
