#pragma once

#include "philap/common.hpp"

#include <random>
#include <vector>

namespace philap {

// Seeded sampler shared by probes and property tests.  All draws are
// reproducible given the seed.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b);
  // Log-uniform radius in [rmin, rmax], rmin > 0.
  double log_radius(double rmin, double rmax);
  // Uniform direction on the unit sphere of R^n.
  Vec direction(int n);
  // Radius * direction with log-uniform radius.
  Vec log_point(int n, double rmin, double rmax);
  // Uniform point in the centered ball of the given radius.
  Vec ball_point(int n, double radius);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Deterministic direction set: +-axes followed by seeded sphere samples,
// `extra` of them.  Used where a min/max over directions is probed.
std::vector<Vec> direction_set(int n, int extra, std::uint64_t seed);

// Log-spaced grid of `count` values between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace philap
