#pragma once

#include "philap/problem.hpp"

namespace philap {

struct SolveResult {
  explicit SolveResult(Trajectory best) : u(std::move(best)) {}

  Trajectory u;
  double action_value = 0.0;
  ResidualStats stats;
  long iterations = 0;   // summed over starts
  int restarts_used = 0;
  int best_start = 0;
  bool converged = false;
};

// Multi-start minimization of the discrete action: quasi-Newton descent on a
// Huber/softmax-smoothed surrogate with the smoothing parameter halved on a
// schedule, kink snapping, then a normalized subgradient polish with step
// schedule a/(1+k/b) on the exact objective.  Starts: the zero trajectory,
// constants at +-multistart_radius along the axes, then seeded band-limited
// random trajectories; the best start by action wins (ties by start order).
// Budget exhaustion returns converged=false with the best iterate.
SolveResult minimize(const DiscreteProblem& problem);
// Same, with a caller-supplied first start.
SolveResult minimize(const DiscreteProblem& problem, const Trajectory& init);

}  // namespace philap
