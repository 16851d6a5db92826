#include "philap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>

#include "philap/sampling.hpp"

namespace philap {

namespace {

// Flattened (column-major) view of the node matrix as the optimization
// variable.
struct Model {
  const DiscreteProblem* prob;
  double mu;  // 0 = exact objective with minimal-norm selections

  double value(const Vec& x) const {
    const int N = prob->nodes();
    const int n = prob->dimension();
    const double h = prob->h();
    Eigen::Map<const Mat> U(x.data(), N, n);
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
      const Vec du = (U.row((i + 1) % N) - U.row(i)).transpose() / h;
      const Vec ui = U.row(i).transpose();
      total += prob->phi().value(du);
      total += mu > 0.0
                   ? prob->potential().smoothed_value(prob->time(i), ui, mu)
                   : prob->potential().value(prob->time(i), ui);
    }
    return h * total;
  }

  // Gradient (exact case: minimal-norm subgradient); row_max gets the
  // largest per-node row norm, which bounds h x (EL residual), and sum_norm
  // the norm of the row sum, which telescopes to exactly |h sum xi| (the
  // mean-selection condition).
  Vec gradient(const Vec& x, double* row_max, double* sum_norm = nullptr) const {
    const int N = prob->nodes();
    const int n = prob->dimension();
    const double h = prob->h();
    Eigen::Map<const Mat> U(x.data(), N, n);
    Mat W(N, n);
    for (int i = 0; i < N; ++i) {
      const Vec du = (U.row((i + 1) % N) - U.row(i)).transpose() / h;
      W.row(i) = prob->phi().gradient(du).transpose();
    }
    Vec g(N * n);
    Eigen::Map<Mat> G(g.data(), N, n);
    double mx = 0.0;
    Vec total = Vec::Zero(n);
    for (int i = 0; i < N; ++i) {
      const Vec ui = U.row(i).transpose();
      const Vec xi =
          mu > 0.0 ? prob->potential().smoothed_gradient(prob->time(i), ui, mu)
                   : prob->potential()
                         .subdiff(prob->time(i), ui)
                         .min_norm_element();
      G.row(i) = W.row((i + N - 1) % N) - W.row(i) + h * xi.transpose();
      mx = std::max(mx, G.row(i).norm());
      total += G.row(i).transpose();
    }
    if (row_max) *row_max = mx;
    if (sum_norm) *sum_norm = total.norm();
    return g;
  }
};

// Zeroes kink-block coordinates that are within snap_tol of the origin, so
// exact subdifferential balls activate there.
bool snap_kinks(const DiscreteProblem& prob, Vec& x) {
  const auto& terms = prob.potential().terms();
  const int N = prob.nodes();
  const int n = prob.dimension();
  Eigen::Map<Mat> U(x.data(), N, n);
  const double tol =
      prob.options().snap_tol * (1.0 + U.cwiseAbs().maxCoeff());
  bool changed = false;
  for (const auto& term : terms) {
    if (term.kind != PotentialTerm::Kind::abs_norm) continue;
    for (int i = 0; i < N; ++i) {
      double nb = 0.0;
      for (int c : term.block) nb += U(i, c) * U(i, c);
      nb = std::sqrt(nb);
      if (nb > 0.0 && nb <= tol) {
        for (int c : term.block) U(i, c) = 0.0;
        changed = true;
      }
    }
  }
  return changed;
}

void try_snap(const Model& exact, const DiscreteProblem& prob, Vec& x,
              double& f) {
  Vec trial = x;
  if (!snap_kinks(prob, trial)) return;
  const double ft = exact.value(trial);
  if (ft <= f + 1e-12 * (1.0 + std::abs(f))) {
    x = std::move(trial);
    f = ft;
  }
}

struct PhaseOutcome {
  long iterations = 0;
  bool plateau = false;
  bool grad_ok = false;
};

// Limited-memory BFGS with backtracking Armijo search.  Stops on the
// per-node gradient row tolerance (plus the row-sum tolerance, standing in
// for the mean-selection condition), an action plateau, or the budget.
PhaseOutcome lbfgs(const Model& m, Vec& x, long budget, double row_tol,
                   double mean_tol, double tol_action, int patience) {
  PhaseOutcome out;
  if (budget <= 0) return out;
  constexpr int kMemory = 8;
  std::deque<std::pair<Vec, Vec>> pairs;  // (s, y)
  double f = m.value(x);
  double row_max = 0.0, sum_norm = 0.0;
  Vec g = m.gradient(x, &row_max, &sum_norm);
  int stall = 0;
  for (long it = 0; it < budget; ++it) {
    if (row_max <= row_tol && sum_norm <= mean_tol) {
      out.grad_ok = true;
      break;
    }
    // Two-loop recursion.
    Vec d = -g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
      const auto& [s, y] = pairs[k];
      const double rho = 1.0 / s.dot(y);
      alpha[k] = rho * s.dot(d);
      d -= alpha[k] * y;
    }
    if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      d *= s.dot(y) / y.squaredNorm();
    } else {
      d /= std::max(1.0, g.norm());
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [s, y] = pairs[k];
      const double rho = 1.0 / s.dot(y);
      d += (alpha[k] - rho * y.dot(d)) * s;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      pairs.clear();
      d = -g / std::max(1.0, g.norm());
      slope = g.dot(d);
    }
    double step = 1.0;
    double f_new = kInf;
    Vec x_new;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = x + step * d;
      f_new = m.value(x_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      pairs.clear();
      break;
    }
    double row_new = 0.0, sum_new = 0.0;
    Vec g_new = m.gradient(x_new, &row_new, &sum_new);
    Vec s = x_new - x;
    Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      pairs.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(pairs.size()) > kMemory) pairs.pop_front();
    }
    const double decrease = f - f_new;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    row_max = row_new;
    sum_norm = sum_new;
    if (decrease <= tol_action * (1.0 + std::abs(f))) {
      if (++stall >= patience) {
        out.plateau = true;
        break;
      }
    } else {
      stall = 0;
    }
  }
  if (row_max <= row_tol && sum_norm <= mean_tol) out.grad_ok = true;
  return out;
}

PhaseOutcome subgradient_polish(const Model& exact, const DiscreteProblem& prob,
                                Vec& x, long budget, double row_tol,
                                double mean_tol) {
  PhaseOutcome out;
  const auto& opt = prob.options();
  double f_best = exact.value(x);
  Vec x_best = x;
  const double scale = 1.0 + std::abs(f_best);
  int stall = 0;
  for (long k = 0; k < budget; ++k) {
    double row_max = 0.0, sum_norm = 0.0;
    const Vec g = exact.gradient(x, &row_max, &sum_norm);
    if (row_max <= row_tol && sum_norm <= mean_tol) {
      out.grad_ok = true;
      break;
    }
    const double gn = g.norm();
    if (!(gn > 0.0)) {
      out.grad_ok = true;
      break;
    }
    const double step =
        opt.step_a * scale /
        ((1.0 + static_cast<double>(k) / opt.step_b) * gn);
    x -= step * g;
    snap_kinks(prob, x);
    const double f = exact.value(x);
    ++out.iterations;
    if (f < f_best - opt.tol_action * (1.0 + std::abs(f_best))) {
      f_best = f;
      x_best = x;
      stall = 0;
    } else if (++stall >= opt.patience) {
      out.plateau = true;
      break;
    }
  }
  x = std::move(x_best);
  if (!out.plateau && out.iterations == budget) out.plateau = false;
  return out;
}

std::vector<Vec> make_starts(const DiscreteProblem& prob,
                             const Trajectory* init) {
  const auto& opt = prob.options();
  const int N = prob.nodes();
  const int n = prob.dimension();
  const double r0 = opt.multistart_radius;
  std::vector<Vec> starts;
  auto push_constant = [&](const Vec& c) {
    Mat U(N, n);
    for (int i = 0; i < N; ++i) U.row(i) = c.transpose();
    starts.push_back(Eigen::Map<const Vec>(U.data(), U.size()));
  };
  if (init) {
    const Mat& U = init->values();
    starts.push_back(Eigen::Map<const Vec>(U.data(), U.size()));
  }
  push_constant(Vec::Zero(n));
  for (int j = 0; j < n && static_cast<int>(starts.size()) < opt.restarts;
       ++j) {
    Vec c = Vec::Zero(n);
    c[j] = r0;
    push_constant(c);
    if (static_cast<int>(starts.size()) < opt.restarts) {
      c[j] = -r0;
      push_constant(c);
    }
  }
  int k = 0;
  while (static_cast<int>(starts.size()) <
         opt.restarts + (init ? 1 : 0)) {
    char tag[32];
    std::snprintf(tag, sizeof(tag), "start-%d", k++);
    Sampler smp(derive_seed(opt.seed, tag));
    const Vec mean = smp.ball_point(n, r0);
    Mat U(N, n);
    for (int i = 0; i < N; ++i) U.row(i) = mean.transpose();
    for (int mode = 1; mode <= 3; ++mode) {
      const Vec a = smp.ball_point(n, r0 / (2.0 * mode));
      const Vec b = smp.ball_point(n, r0 / (2.0 * mode));
      for (int i = 0; i < N; ++i) {
        const double w = 2.0 * kPi * mode * i / N;
        U.row(i) += (a * std::cos(w) + b * std::sin(w)).transpose();
      }
    }
    starts.push_back(Eigen::Map<const Vec>(U.data(), U.size()));
  }
  return starts;
}

}  // namespace

SolveResult run_minimize(const DiscreteProblem& prob, const Trajectory* init);

SolveResult run_minimize(const DiscreteProblem& prob, const Trajectory* init) {
  const auto& opt = prob.options();
  const int N = prob.nodes();
  const int n = prob.dimension();
  const double h = prob.h();
  const Model exact{&prob, 0.0};
  // A per-node gradient row below this bounds the EL residual by
  // tol_residual / 2 (residual_i <= |g_i| / h); the row-sum target likewise
  // bounds the mean-selection condition by tol_mean / 2.
  const double row_tol = 0.5 * opt.tol_residual * h;
  const double mean_tol = 0.5 * opt.tol_mean;
  const bool smooth = prob.potential().smooth();

  auto starts = make_starts(prob, init);
  long total_iterations = 0;
  int best_index = -1;
  double best_f = kInf;
  Vec best_x;
  bool best_settled = false;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Vec x = starts[s];
    long budget = opt.max_iterations;
    bool settled = false;
    if (!smooth && opt.smoothing_levels > 0) {
      double mu = opt.smoothing_mu0;
      const long per_level =
          std::max<long>(50, (budget * 3) / (5 * opt.smoothing_levels));
      for (int lvl = 0; lvl < opt.smoothing_levels && budget > 0; ++lvl) {
        const Model m{&prob, mu};
        const auto ph =
            lbfgs(m, x, std::min(per_level, budget),
                  std::max(row_tol, 0.1 * mu * h), kInf, opt.tol_action,
                  opt.patience);
        budget -= ph.iterations;
        total_iterations += ph.iterations;
        double f = exact.value(x);
        try_snap(exact, prob, x, f);
        mu *= 0.5;
      }
      const auto ph = subgradient_polish(
          exact, prob, x, std::min(opt.polish_iterations, budget), row_tol,
          mean_tol);
      budget -= ph.iterations;
      total_iterations += ph.iterations;
      settled = ph.grad_ok || ph.plateau;
    } else {
      const auto ph = lbfgs(exact, x, budget, row_tol, mean_tol,
                            opt.tol_action, opt.patience);
      budget -= ph.iterations;
      total_iterations += ph.iterations;
      settled = ph.grad_ok || ph.plateau;
    }
    const double f = exact.value(x);
    const bool first = best_index < 0;
    const bool improves =
        !first && f < best_f - 1e-15 * (1.0 + std::abs(best_f));
    const bool replaces_nonfinite =
        !first && !std::isfinite(best_f) && std::isfinite(f);
    if (first || improves || replaces_nonfinite) {
      best_f = f;
      best_x = x;
      best_index = static_cast<int>(s);
      best_settled = settled;
    }
  }
  Eigen::Map<const Mat> U(best_x.data(), N, n);
  SolveResult result(Trajectory(prob.period(), U));
  result.action_value = action(prob, result.u);
  result.stats = el_residual(prob, result.u);
  result.iterations = total_iterations;
  result.restarts_used = static_cast<int>(starts.size());
  result.best_start = best_index;
  result.converged =
      best_settled && result.stats.max <= opt.tol_residual;
  return result;
}

SolveResult minimize(const DiscreteProblem& problem) {
  return run_minimize(problem, nullptr);
}

SolveResult minimize(const DiscreteProblem& problem, const Trajectory& init) {
  return run_minimize(problem, &init);
}

}  // namespace philap
