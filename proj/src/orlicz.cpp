#include "philap/orlicz.hpp"

#include "philap/conjugate.hpp"

#include <cmath>
#include <stdexcept>

namespace philap {

namespace {

void check_dims(const GFunction& phi, const Trajectory& u) {
  if (phi.dimension() != u.dimension())
    throw std::invalid_argument("orlicz: dimension mismatch");
}

}  // namespace

double modular(const GFunction& phi, const Trajectory& u) {
  check_dims(phi, u);
  double s = 0.0;
  for (int i = 0; i < u.nodes(); ++i) s += phi.value(u.node(i));
  return u.h() * s;
}

double luxemburg_norm(const GFunction& phi, const Trajectory& u) {
  check_dims(phi, u);
  if (u.values().isZero(0.0)) return 0.0;

  auto rho = [&](double lambda) {
    double s = 0.0;
    for (int i = 0; i < u.nodes(); ++i) {
      s += phi.value(u.node(i) / lambda);
      if (!std::isfinite(s)) return kInf;
    }
    return u.h() * s;
  };

  // Bracket [lo, hi] with rho(lo) > 1 >= rho(hi).
  double lo = 0.0, hi = 0.0;
  if (rho(1.0) > 1.0) {
    lo = 1.0;
    hi = 2.0;
    int k = 0;
    while (rho(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++k > 60)
        throw std::runtime_error("luxemburg_norm: bracketing failed upward");
    }
  } else {
    hi = 1.0;
    lo = 0.5;
    int k = 0;
    while (rho(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (++k > 60) return hi;  // modular stays <= 1 down to 1e-18: treat as 0+
    }
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (rho(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  // hi certifies rho(u/hi) <= 1.
  return hi;
}

double amemiya_bound_gap(const GFunction& phi, const Trajectory& u) {
  return modular(phi, u) + 1.0 - luxemburg_norm(phi, u);
}

Decomposition decompose(const Trajectory& u) {
  const Vec m = u.mean();
  Mat v = u.values();
  v.rowwise() -= m.transpose();
  return {m, Trajectory(u.period(), std::move(v))};
}

double holder_gap(const GFunction& phi, const Trajectory& u,
                  const Trajectory& v) {
  check_dims(phi, u);
  if (u.nodes() != v.nodes() || u.dimension() != v.dimension() ||
      u.period() != v.period())
    throw std::invalid_argument("holder_gap: trajectories must share a grid");
  const GFunction conj = conjugate_function(phi);
  const double nu = luxemburg_norm(phi, u);
  const double nv = luxemburg_norm(conj, v);
  double pairing = 0.0;
  for (int i = 0; i < u.nodes(); ++i) pairing += v.node(i).dot(u.node(i));
  pairing *= u.h();
  return 2.0 * nu * nv - pairing;
}

WirtingerGap wirtinger_gap(const GFunction& phi, const Trajectory& u) {
  check_dims(phi, u);
  const double T = u.period();
  const Trajectory du = u.derivative();
  double rhs = 0.0;
  for (int i = 0; i < u.nodes(); ++i) rhs += phi.value(T * du.node(i));
  rhs *= u.h() / T;

  const Trajectory tilde = decompose(u).tilde;
  WirtingerGap out;
  out.gap = kInf;
  double prev = phi.value(tilde.node(0));
  double first = prev;
  for (int i = 0; i < u.nodes(); ++i) {
    const double cur = phi.value(tilde.node(i));
    out.gap = std::min(out.gap, rhs - cur);
    if (i > 0) out.slack = std::max(out.slack, std::abs(cur - prev));
    prev = cur;
  }
  out.slack = std::max(out.slack, std::abs(first - prev));
  return out;
}

SobolevNorms sobolev_norms(const GFunction& phi, const Trajectory& u) {
  SobolevNorms out;
  const double du_norm = luxemburg_norm(phi, u.derivative());
  out.standard = luxemburg_norm(phi, u) + du_norm;
  out.equivalent = u.mean().norm() + du_norm;
  return out;
}

}  // namespace philap
