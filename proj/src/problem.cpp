#include "philap/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace philap {

DiscreteProblem::DiscreteProblem(GFunction phi, Potential F, double period,
                                 int nodes, SolverOptions options)
    : phi_(std::move(phi)),
      F_(std::move(F)),
      period_(period),
      nodes_(nodes),
      options_(options) {
  if (phi_.dimension() != F_.dimension())
    throw std::invalid_argument(
        "DiscreteProblem: phi and potential dimensions differ");
  if (!(period_ > 0.0))
    throw std::invalid_argument("DiscreteProblem: period must be positive");
  if (nodes_ < 4)
    throw std::invalid_argument(
        "DiscreteProblem: need at least 4 nodes for the periodic stencil");
}

namespace {

void check_match(const DiscreteProblem& problem, const Trajectory& u) {
  if (u.dimension() != problem.dimension())
    throw std::invalid_argument("trajectory dimension does not match problem");
  if (u.nodes() != problem.nodes())
    throw std::invalid_argument("trajectory node count does not match problem");
  if (std::abs(u.period() - problem.period()) >
      1e-9 * (1.0 + problem.period()))
    throw std::invalid_argument("trajectory period does not match problem");
}

// Rows of grad phi at the forward differences.
Mat derivative_gradients(const DiscreteProblem& problem, const Trajectory& u) {
  const int N = problem.nodes();
  const double h = problem.h();
  const Mat& U = u.values();
  Mat W(N, problem.dimension());
  for (int i = 0; i < N; ++i) {
    const Vec du = (U.row((i + 1) % N) - U.row(i)).transpose() / h;
    W.row(i) = problem.phi().gradient(du).transpose();
  }
  return W;
}

}  // namespace

double action(const DiscreteProblem& problem, const Trajectory& u) {
  check_match(problem, u);
  const int N = problem.nodes();
  const double h = problem.h();
  const Mat& U = u.values();
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    const Vec du = (U.row((i + 1) % N) - U.row(i)).transpose() / h;
    total += problem.phi().value(du) +
             problem.potential().value(problem.time(i), U.row(i).transpose());
  }
  return h * total;
}

Mat action_subgradient(const DiscreteProblem& problem, const Trajectory& u) {
  check_match(problem, u);
  const int N = problem.nodes();
  const double h = problem.h();
  const Mat& U = u.values();
  const Mat W = derivative_gradients(problem, u);
  Mat G(N, problem.dimension());
  for (int i = 0; i < N; ++i) {
    const Vec xi = problem.potential()
                       .subdiff(problem.time(i), U.row(i).transpose())
                       .min_norm_element();
    G.row(i) = W.row((i + N - 1) % N) - W.row(i) + h * xi.transpose();
  }
  return G;
}

ResidualStats el_residual(const DiscreteProblem& problem, const Trajectory& u) {
  check_match(problem, u);
  const int N = problem.nodes();
  const double h = problem.h();
  const Mat& U = u.values();
  const Mat W = derivative_gradients(problem, u);
  ResidualStats stats;
  stats.per_node = Vec::Zero(N);
  Vec selection_sum = Vec::Zero(problem.dimension());
  Vec chain = Vec::Zero(problem.dimension());
  for (int i = 0; i < N; ++i) {
    const Vec r = (W.row(i) - W.row((i + N - 1) % N)).transpose() / h;
    const auto set =
        problem.potential().subdiff(problem.time(i), U.row(i).transpose());
    const Vec xi = set.project(r);
    stats.per_node[i] = (r - xi).norm();
    selection_sum += xi;
    if (i >= 1 && i <= N - 1) chain += xi;
    stats.max = std::max(stats.max, stats.per_node[i]);
  }
  stats.mean = stats.per_node.mean();
  stats.mean_condition = (h * selection_sum).norm();
  stats.periodicity_gap =
      ((W.row(N - 1) - W.row(0)).transpose() - h * chain).norm();
  return stats;
}

VerifyReport verify_solution(const DiscreteProblem& problem,
                             const Trajectory& u) {
  VerifyReport report;
  report.stats = el_residual(problem, u);
  const auto& opt = problem.options();
  report.residual_ok = report.stats.max <= opt.tol_residual;
  report.mean_ok = report.stats.mean_condition <= opt.tol_mean;
  report.strictly_convex = problem.phi().strictly_convex();
  report.verified =
      report.residual_ok && report.mean_ok && report.strictly_convex;
  return report;
}

}  // namespace philap
