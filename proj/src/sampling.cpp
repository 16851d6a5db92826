#include "philap/sampling.hpp"

#include <cmath>

namespace philap {

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  // FNV-1a over the tag, then splitmix64-style finalizer mixed with the base.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Sampler::uniform(double a, double b) {
  std::uniform_real_distribution<double> d(a, b);
  return d(rng_);
}

double Sampler::log_radius(double rmin, double rmax) {
  const double u = uniform(std::log(rmin), std::log(rmax));
  return std::exp(u);
}

Vec Sampler::direction(int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) v[i] = g(rng_);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

Vec Sampler::log_point(int n, double rmin, double rmax) {
  return log_radius(rmin, rmax) * direction(n);
}

Vec Sampler::ball_point(int n, double radius) {
  // Radius distributed as r^(1/n) gives the uniform ball measure.
  const double u = uniform(0.0, 1.0);
  return radius * std::pow(u, 1.0 / n) * direction(n);
}

std::vector<Vec> direction_set(int n, int extra, std::uint64_t seed) {
  std::vector<Vec> dirs;
  dirs.reserve(2 * n + extra);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  Sampler s(seed);
  for (int k = 0; k < extra; ++k) dirs.push_back(s.direction(n));
  return dirs;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  g.reserve(count);
  if (count == 1) {
    g.push_back(lo);
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    g.push_back(std::exp(a + (b - a) * i / (count - 1)));
  }
  return g;
}

}  // namespace philap
