#pragma once

#include "philap/gfunction.hpp"
#include "philap/trajectory.hpp"

namespace philap {

// Discrete modular rho_phi(u) = h * sum_i phi(u_i) (left-endpoint sum).
double modular(const GFunction& phi, const Trajectory& u);

// Luxemburg norm inf{lambda > 0 : rho_phi(u/lambda) <= 1}, by bracketing
// from lambda = 1 (at most 60 doublings/halvings) and bisection to relative
// tolerance 1e-10.  Returns 0 for u identically zero.
double luxemburg_norm(const GFunction& phi, const Trajectory& u);

// rho_phi(u) + 1 - ||u||_phi; nonnegative for G-functions.
double amemiya_bound_gap(const GFunction& phi, const Trajectory& u);

struct Decomposition {
  Vec mean;          // (h/T) sum u_i
  Trajectory tilde;  // u - mean, node by node
};
Decomposition decompose(const Trajectory& u);

// 2 ||u||_phi ||v||_{phi*} - h sum <v_i, u_i>; the conjugate norm integrand
// goes through conjugate_function(phi).
double holder_gap(const GFunction& phi, const Trajectory& u,
                  const Trajectory& v);

struct WirtingerGap {
  // min_i [(1/T) h sum_r phi(T u'_r) - phi(tilde u_i)]
  double gap = 0.0;
  // Discretization slack: max variation of phi over one cell of tilde u.
  double slack = 0.0;
};
WirtingerGap wirtinger_gap(const GFunction& phi, const Trajectory& u);

struct SobolevNorms {
  double standard = 0.0;    // ||u||_phi + ||u'||_phi
  double equivalent = 0.0;  // |mean u| + ||u'||_phi
};
SobolevNorms sobolev_norms(const GFunction& phi, const Trajectory& u);

}  // namespace philap
