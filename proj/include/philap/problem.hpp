#pragma once

#include "philap/gfunction.hpp"
#include "philap/potential.hpp"
#include "philap/trajectory.hpp"

namespace philap {

struct SolverOptions {
  int restarts = 8;
  std::uint64_t seed = 1;
  long max_iterations = 200000;  // per start, across all phases
  // Relative action-plateau threshold; a run settles once the decrease stays
  // below tol_action * (1 + |action|) for `patience` consecutive accepted
  // steps.  The window is long because degenerate kinetic terms shrink the
  // action very slowly while the residual is still far from its target.
  double tol_action = 1e-9;
  int patience = 300;
  double tol_residual = 1e-3;  // max Euler-Lagrange residual
  double tol_mean = 1e-6;      // |h sum of selections|
  // Subgradient polish schedule a / (1 + k/b), normalized by the
  // subgradient norm.
  double step_a = 1.0;
  double step_b = 100.0;
  double multistart_radius = 1.0;
  int smoothing_levels = 6;   // mu halvings before the exact phase
  double smoothing_mu0 = 0.1;
  long polish_iterations = 4000;  // exact-phase cap (within max_iterations)
  double snap_tol = 1e-7;  // kink-block coordinates below this snap to zero
};

// Periodic discretization of the action on N nodes: forward differences for
// the derivative, left-endpoint quadrature for both integrals, indices mod N.
class DiscreteProblem {
 public:
  DiscreteProblem(GFunction phi, Potential F, double period, int nodes,
                  SolverOptions options = {});

  const GFunction& phi() const { return phi_; }
  const Potential& potential() const { return F_; }
  double period() const { return period_; }
  int nodes() const { return nodes_; }
  double h() const { return period_ / nodes_; }
  double time(int i) const { return h() * i; }
  int dimension() const { return phi_.dimension(); }
  const SolverOptions& options() const { return options_; }
  SolverOptions& options() { return options_; }

 private:
  GFunction phi_;
  Potential F_;
  double period_;
  int nodes_;
  SolverOptions options_;
};

// h * sum_i [phi(u'_i) + F(t_i, u_i)].
double action(const DiscreteProblem& problem, const Trajectory& u);

// Per-node subgradient rows g_i = h [ -(w_i - w_{i-1})/h + xi_i ] with
// w_i = grad phi(u'_i) and xi_i the minimal-norm element of the
// subdifferential of F at (t_i, u_i); stationarity of the discrete action is
// exactly the discrete Euler-Lagrange inclusion.
Mat action_subgradient(const DiscreteProblem& problem, const Trajectory& u);

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  // |h sum_i xi*_i| with xi*_i the projection of r_i onto the
  // subdifferential set (the discrete zero-mean selection condition).
  double mean_condition = 0.0;
  // Misfit of reconstructing w_{N-1} from w_0 by chaining the projected
  // selections (the derivative-periodicity closure).
  double periodicity_gap = 0.0;
  Vec per_node;
};

// r_i = (w_i - w_{i-1})/h compared against the subdifferential of F at
// (t_i, u_i); wraparound indices encode u'(0) = u'(T).
ResidualStats el_residual(const DiscreteProblem& problem, const Trajectory& u);

struct VerifyReport {
  bool verified = false;
  bool residual_ok = false;
  bool mean_ok = false;
  bool strictly_convex = false;
  ResidualStats stats;
};

VerifyReport verify_solution(const DiscreteProblem& problem,
                             const Trajectory& u);

}  // namespace philap
