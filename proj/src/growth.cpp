#include "philap/growth.hpp"

#include "philap/orlicz.hpp"
#include "philap/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace philap {

GrowthReport delta2_report(const GFunction& phi, double radius, int samples,
                           std::uint64_t seed) {
  if (samples < 100)
    throw std::invalid_argument("delta2_report: at least 100 samples");
  if (!(radius > 0.0))
    throw std::invalid_argument("delta2_report: radius must be positive");

  GrowthReport rep;
  rep.radius = radius;
  rep.samples = samples;

  const double rmin = std::min(1e-3, radius * 1e-6);
  const int decades =
      std::max(2, static_cast<int>(std::ceil(std::log10(radius / rmin))));
  const int per_decade = std::max(8, samples / decades);
  Sampler s(derive_seed(seed, "delta2"));

  double best = 1.0;
  rep.delta2_witness = Vec::Zero(phi.dimension());
  std::vector<Vec> points;
  for (int d = 0; d < decades; ++d) {
    const double lo = rmin * std::pow(10.0, d);
    const double hi = std::min(radius, lo * 10.0);
    double decade_max = -kInf;
    for (int k = 0; k < per_decade; ++k) {
      const Vec x = s.log_point(phi.dimension(), lo, hi);
      points.push_back(x);
      const double fx = phi.value(x);
      if (!(fx > 1e-300) || !std::isfinite(fx)) continue;
      const double f2x = phi.value(2.0 * x);
      const double ratio = (f2x - 1.0) / fx;
      decade_max = std::max(decade_max, ratio);
      if (std::isinf(ratio)) {
        rep.delta2_unbounded = true;
        rep.delta2_witness = x;
        continue;
      }
      if (ratio > best) {
        best = ratio;
        rep.delta2_witness = x;
      }
    }
    rep.radius_trend.emplace_back(hi, decade_max);
  }
  rep.delta2_constant = std::max(1.0, best);

  // Unbounded when the per-decade max keeps growing geometrically at the
  // outer edge of the sampled range.
  const auto& tr = rep.radius_trend;
  if (tr.size() >= 3) {
    const double a = tr[tr.size() - 3].second;
    const double b = tr[tr.size() - 2].second;
    const double c = tr[tr.size() - 1].second;
    if ((std::isinf(c) && b > 0.0) ||
        (a > 0.0 && b > 1.5 * a && c > 1.5 * b)) {
      rep.delta2_unbounded = true;
    }
  }

  // Scaling-pair scan: phi(x) <= (1/(2 l)) phi(l x) + C, looking for the
  // smallest power-of-two l whose deficit vanishes away from the origin.
  const double tail_r = std::max(1.0, radius / 100.0);
  for (int e = 1; e <= 20; ++e) {
    const double l = std::pow(2.0, e);
    double C_all = 0.0;
    double C_tail = 0.0;
    for (const Vec& x : points) {
      const double fx = phi.value(x);
      const double flx = phi.value(l * x);
      if (!std::isfinite(fx)) continue;
      const double deficit = std::isinf(flx) ? -kInf : fx - flx / (2.0 * l);
      C_all = std::max(C_all, deficit);
      if (x.norm() >= tail_r) C_tail = std::max(C_tail, deficit);
    }
    if (C_tail <= 1e-9 * (1.0 + std::abs(C_all))) {
      rep.nabla2_found = true;
      rep.nabla2_l = static_cast<int>(l);
      rep.nabla2_C = C_all;
      break;
    }
  }
  return rep;
}

OrderResult order_llcurly(const GFunction& phi0, const GFunction& phi1,
                          const std::vector<double>& k_grid, double radius,
                          std::uint64_t seed) {
  if (phi0.dimension() != phi1.dimension())
    throw std::invalid_argument("order_llcurly: dimension mismatch");
  if (k_grid.empty())
    throw std::invalid_argument("order_llcurly: empty k grid");

  const int n = phi0.dimension();
  const auto dirs = direction_set(n, 6, derive_seed(seed, "order"));
  const auto radii = log_grid(std::min(1e-3, radius * 1e-6), radius, 160);

  OrderResult out;
  out.ordered = true;
  for (double k : k_grid) {
    double last_fail_radius = -1.0;
    Vec last_fail_x;
    for (double r : radii) {
      for (const Vec& d : dirs) {
        const Vec x = r * d;
        const double lhs = phi0.value(x);
        const double rhs = phi1.value(k * x);
        if (lhs > rhs + 1e-12 * (1.0 + std::abs(rhs))) {
          last_fail_radius = r;
          last_fail_x = x;
        }
      }
    }
    if (last_fail_radius >= radii.back()) {
      out.ordered = false;
      out.failing_k = k;
      out.witness_x = last_fail_x;
      out.thresholds.emplace_back(k, kInf);
      continue;
    }
    // Smallest sampled radius beyond which the bound held everywhere.
    double R = 0.0;
    for (double r : radii) {
      if (r > last_fail_radius) {
        R = r;
        break;
      }
    }
    out.thresholds.emplace_back(k, R);
  }
  return out;
}

namespace {

// Least-squares slope of y over x with RMS residual.
std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - slope * x[i] - intercept;
    rss += r * r;
  }
  return {slope, std::sqrt(rss / n)};
}

}  // namespace

IndexEstimate matuszewska_indices(const GFunction& phi, std::uint64_t seed) {
  if (!phi.is_n_function())
    throw std::invalid_argument(
        "matuszewska_indices: requires the n-function flag");

  const int n = phi.dimension();
  const auto dirs = direction_set(n, 6, derive_seed(seed, "indices"));
  const auto radii = log_grid(1e-3, 1e3, 25);

  std::vector<Vec> sample_u;
  sample_u.reserve(dirs.size() * radii.size());
  for (double r : radii)
    for (const Vec& d : dirs) sample_u.push_back(r * d);

  auto logM = [&](double lambda) {
    double best = -kInf;
    for (const Vec& u : sample_u) {
      const double fu = phi.value(u);
      if (!(fu > 1e-300) || !std::isfinite(fu)) continue;
      const double fl = phi.value(lambda * u);
      if (fl <= 0.0) continue;
      best = std::max(best, std::log(fl) - std::log(fu));
    }
    return best;
  };

  auto estimate = [&](double lam_lo, double lam_hi) {
    const auto lams = log_grid(lam_lo, lam_hi, 7);
    std::vector<double> xs, ys;
    for (double lam : lams) {
      const double v = logM(lam);
      if (std::isfinite(v)) {
        xs.push_back(std::log(lam));
        ys.push_back(v);
      }
    }
    if (xs.size() < 3) return std::pair<double, double>{kInf, kInf};
    return fit_slope(xs, ys);
  };

  IndexEstimate est;
  auto [alpha, res_a] = estimate(1e-6, 1e-3);
  auto [beta, res_b] = estimate(1e3, 1e6);
  est.alpha = alpha;
  est.beta = beta;
  est.fit_residual_alpha = res_a;
  est.fit_residual_beta = res_b;
  est.degenerate = !(std::isfinite(alpha) && std::isfinite(beta)) ||
                   res_a > 0.1 || res_b > 0.1;
  return est;
}

Lemma52Report lemma52_growth_probe(const GFunction& phi, double mu,
                                   const std::vector<Trajectory>& trajectories,
                                   int steps) {
  Lemma52Report rep;
  rep.mu = mu;
  rep.alpha_estimate = matuszewska_indices(phi).alpha;
  if (!(mu < rep.alpha_estimate))
    throw std::invalid_argument(
        "lemma52_growth_probe: mu must lie below the estimated lower index");
  if (steps < 5) steps = 5;

  rep.pass = true;
  for (const Trajectory& base : trajectories) {
    const double norm0 = luxemburg_norm(phi, base);
    if (!(norm0 > 0.0))
      throw std::invalid_argument(
          "lemma52_growth_probe: zero trajectory in the sample set");
    std::vector<Lemma52Report::Row> trend;
    // Rescale so the norm starts at 1 and grows by x10 per step; the norm is
    // positively homogeneous, so scaling the values scales the norm.
    for (int k = 0; k < steps; ++k) {
      const double target = std::pow(10.0, k);
      const double c = target / norm0;
      Trajectory u(base.period(), base.values() * c);
      Lemma52Report::Row row;
      row.norm = luxemburg_norm(phi, u);
      row.modular = modular(phi, u);
      row.ratio = row.modular / std::pow(row.norm, mu);
      trend.push_back(row);
    }
    // Longest run of strictly increasing steps ending at the last row.
    int suffix = 0;
    for (std::size_t i = trend.size(); i-- > 1;) {
      if (trend[i].ratio > trend[i - 1].ratio)
        ++suffix;
      else
        break;
    }
    if (suffix < 4) rep.pass = false;
    rep.trends.push_back(std::move(trend));
  }
  return rep;
}

}  // namespace philap
