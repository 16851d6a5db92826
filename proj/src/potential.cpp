#include "philap/potential.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "philap/sampling.hpp"

namespace philap {

namespace {

Vec gather(ConstVecRef x, const std::vector<int>& coords) {
  Vec out(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) out[i] = x[coords[i]];
  return out;
}

void scatter_add(Vec& x, const std::vector<int>& coords, ConstVecRef v,
                 double scale) {
  for (std::size_t i = 0; i < coords.size(); ++i)
    x[coords[i]] += scale * v[i];
}

void check_block(const std::vector<int>& block, int dim, const char* what) {
  if (block.empty()) throw std::invalid_argument(std::string(what) + ": empty coordinate block");
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (block[i] < 0 || block[i] >= dim)
      throw std::invalid_argument(std::string(what) + ": coordinate index out of range");
    if (i > 0 && block[i] <= block[i - 1])
      throw std::invalid_argument(std::string(what) + ": coordinates must be strictly increasing");
  }
}

}  // namespace

SubdiffSet::SubdiffSet(int dim, Vec base, std::vector<BlockBall> balls,
                       std::vector<Mat> hulls)
    : dim_(dim), base_(std::move(base)) {
  if (dim_ < 1) throw std::invalid_argument("SubdiffSet: dimension must be positive");
  if (base_.size() != dim_) throw std::invalid_argument("SubdiffSet: base dimension mismatch");
  std::vector<char> used(static_cast<std::size_t>(dim_), 0);
  for (auto& b : balls) {
    check_block(b.coords, dim_, "SubdiffSet ball");
    if (!(b.radius >= 0.0)) throw std::invalid_argument("SubdiffSet: ball radius must be nonnegative");
    if (b.radius == 0.0) continue;
    for (int c : b.coords) {
      if (used[static_cast<std::size_t>(c)])
        throw std::invalid_argument("SubdiffSet: ball blocks must be disjoint");
      used[static_cast<std::size_t>(c)] = 1;
    }
    balls_.push_back(std::move(b));
  }
  for (auto& h : hulls) {
    if (h.rows() == 0) continue;
    if (h.cols() != dim_) throw std::invalid_argument("SubdiffSet: hull dimension mismatch");
    if (h.rows() == 1) {
      base_ += h.row(0).transpose();
      continue;
    }
    hulls_.push_back(std::move(h));
  }
}

double SubdiffSet::support(ConstVecRef v) const {
  if (v.size() != dim_) throw std::invalid_argument("SubdiffSet::support: dimension mismatch");
  double s = base_.dot(v);
  for (const auto& b : balls_) s += b.radius * gather(v, b.coords).norm();
  for (const auto& h : hulls_) s += (h * v).maxCoeff();
  return s;
}

double SubdiffSet::max_norm() const {
  std::size_t tuples = 1;
  for (const auto& h : hulls_) {
    tuples *= static_cast<std::size_t>(h.rows());
    if (tuples > (1u << 20))
      throw std::runtime_error("SubdiffSet::max_norm: too many hull vertex combinations");
  }
  double best = 0.0;
  std::vector<Eigen::Index> idx(hulls_.size(), 0);
  for (std::size_t k = 0; k < tuples; ++k) {
    Vec z = base_;
    std::size_t rem = k;
    for (std::size_t hi = 0; hi < hulls_.size(); ++hi) {
      const auto rows = static_cast<std::size_t>(hulls_[hi].rows());
      z += hulls_[hi].row(static_cast<Eigen::Index>(rem % rows)).transpose();
      rem /= rows;
    }
    double sq = z.squaredNorm();
    for (const auto& b : balls_) {
      const double nb = gather(z, b.coords).norm();
      sq += (nb + b.radius) * (nb + b.radius) - nb * nb;
    }
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

namespace {

struct ProjectionResult {
  Vec point;
  double dist = 0.0;
};

// Residual after projecting z onto the Minkowski sum of the block balls:
// e = z - argmin_{b in sum of balls} |z - b|.
Vec ball_residual(const Vec& z, const std::vector<BlockBall>& balls) {
  Vec e = z;
  for (const auto& b : balls) {
    const Vec zb = gather(z, b.coords);
    const double nb = zb.norm();
    const double scale = nb > b.radius ? (nb - b.radius) / nb : 0.0;
    for (std::size_t i = 0; i < b.coords.size(); ++i)
      e[b.coords[i]] = zb[i] * scale;
  }
  return e;
}

// Exact Euclidean projection of q onto conv(rows of V) by enumerating faces:
// the projection lies in the relative interior of some face, so solving the
// equality-constrained least squares on every vertex subset and keeping the
// best feasible candidate is exact.  Vertices come from max-term ties, so the
// counts are tiny.
Vec project_hull(const Mat& V, ConstVecRef q) {
  const int m = static_cast<int>(V.rows());
  if (m > 16)
    throw std::runtime_error("SubdiffSet: too many hull vertices to project");
  Vec best = V.row(0).transpose();
  double best_sq = (best - q).squaredNorm();
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < m; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const int k = static_cast<int>(idx.size());
    if (k == 1) {
      const Vec cand = V.row(idx[0]).transpose();
      const double sq = (cand - q).squaredNorm();
      if (sq < best_sq) {
        best_sq = sq;
        best = cand;
      }
      continue;
    }
    Mat Vs(k, V.cols());
    for (int j = 0; j < k; ++j) Vs.row(j) = V.row(idx[j]);
    // KKT system for min |q - Vs^T lambda|^2 subject to sum lambda = 1.
    Mat A = Mat::Zero(k + 1, k + 1);
    A.topLeftCorner(k, k) = Vs * Vs.transpose();
    A.topRightCorner(k, 1).setOnes();
    A.bottomLeftCorner(1, k).setOnes();
    Vec rhs(k + 1);
    rhs.head(k) = Vs * q;
    rhs(k) = 1.0;
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) continue;  // degenerate face: covered by subsets
    const Vec sol = lu.solve(rhs);
    if ((sol.head(k).array() < -1e-12).any()) continue;
    const Vec cand = Vs.transpose() * sol.head(k);
    const double sq = (cand - q).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = cand;
    }
  }
  return best;
}

}  // namespace

ProjectionResult solve_projection(const SubdiffSet& set, ConstVecRef r);

ProjectionResult solve_projection(const SubdiffSet& set, ConstVecRef r) {
  const Vec y = r - set.base();
  const auto& balls = set.balls();
  const auto& hulls = set.hulls();
  if (hulls.empty()) {
    const Vec e = ball_residual(y, balls);
    return {set.base() + (y - e), e.norm()};
  }
  // Alternating exact block projections on f(b, p_1..p_H) = |y - b - sum p|^2
  // with b in the ball sum (closed form) and p_i in hull i (face
  // enumeration).  f is smooth and convex with separable constraints, so a
  // blockwise-optimal point satisfies the joint KKT conditions and is the
  // global projection; a support-function duality gap certifies how far the
  // current value can sit above the true distance.
  std::vector<Vec> p;
  p.reserve(hulls.size());
  for (const auto& h : hulls) p.push_back(h.colwise().mean().transpose());
  Vec b = Vec::Zero(y.size());
  double lb_best = 0.0;  // distance is nonnegative
  double v = kInf;
  Vec e = y;
  const double tol = 1e-9;
  const int max_sweeps = 10000;
  for (int it = 0; it < max_sweeps; ++it) {
    double moved = 0.0;
    for (std::size_t hi = 0; hi < hulls.size(); ++hi) {
      Vec q = y - b;
      for (std::size_t hj = 0; hj < hulls.size(); ++hj)
        if (hj != hi) q -= p[hj];
      Vec next = project_hull(hulls[hi], q);
      moved += (next - p[hi]).norm();
      p[hi] = std::move(next);
    }
    Vec z = y;
    for (const Vec& pi : p) z -= pi;
    e = ball_residual(z, balls);
    const Vec b_next = z - e;
    moved += (b_next - b).norm();
    b = b_next;
    v = e.norm();
    if (v <= 1e-11) break;
    // Supporting-hyperplane lower bound in the residual direction.
    const Vec u = e / v;
    double support = 0.0;
    for (const auto& ball : balls)
      support += ball.radius * gather(u, ball.coords).norm();
    for (const auto& h : hulls) support += (h * u).maxCoeff();
    lb_best = std::max(lb_best, u.dot(y) - support);
    if (v - lb_best <= tol * (1.0 + v)) break;
    if (moved <= 1e-13 * (1.0 + v)) break;  // blockwise fixed point: optimal
    if (it + 1 == max_sweeps) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "SubdiffSet::distance: projection did not converge "
                    "(sweeps=%d, value=%.3e, certified gap=%.3e)",
                    max_sweeps, v, v - lb_best);
      throw std::runtime_error(msg);
    }
  }
  return {set.base() + (y - e), v};
}

double SubdiffSet::distance(ConstVecRef r) const {
  if (r.size() != dim_) throw std::invalid_argument("SubdiffSet::distance: dimension mismatch");
  return solve_projection(*this, r).dist;
}

Vec SubdiffSet::project(ConstVecRef r) const {
  if (r.size() != dim_) throw std::invalid_argument("SubdiffSet::project: dimension mismatch");
  return solve_projection(*this, r).point;
}

std::vector<Vec> SubdiffSet::extreme_points(int extra_dirs,
                                            std::uint64_t seed) const {
  constexpr std::size_t kCap = 4096;
  auto thin = [](std::vector<Vec>& pts) {
    if (pts.size() <= kCap) return;
    std::vector<Vec> kept;
    const std::size_t stride = (pts.size() + kCap - 1) / kCap;
    for (std::size_t i = 0; i < pts.size(); i += stride) kept.push_back(pts[i]);
    pts.swap(kept);
  };
  std::vector<Vec> pts{base_};
  for (const auto& h : hulls_) {
    std::vector<Vec> next;
    next.reserve(pts.size() * static_cast<std::size_t>(h.rows()));
    for (const auto& p : pts)
      for (Eigen::Index rI = 0; rI < h.rows(); ++rI)
        next.push_back(p + h.row(rI).transpose());
    pts.swap(next);
    thin(pts);
  }
  for (const auto& b : balls_) {
    const int k = static_cast<int>(b.coords.size());
    std::vector<Vec> dirs;
    for (int i = 0; i < k; ++i) {
      Vec d = Vec::Zero(k);
      d[i] = 1.0;
      dirs.push_back(d);
      dirs.push_back(-d);
    }
    Sampler smp(derive_seed(seed, "subdiff-ball"));
    for (int i = 0; i < extra_dirs; ++i) dirs.push_back(smp.direction(k));
    std::vector<Vec> next;
    next.reserve(pts.size() * dirs.size());
    for (const auto& p : pts)
      for (const auto& d : dirs) {
        Vec q = p;
        scatter_add(q, b.coords, d, b.radius);
        next.push_back(std::move(q));
      }
    pts.swap(next);
    thin(pts);
  }
  return pts;
}

PotentialTerm PotentialTerm::smooth_term(TimeFn coef, SmoothSpatial f) {
  PotentialTerm t;
  t.coef = std::move(coef);
  t.kind = Kind::smooth;
  t.f = std::move(f);
  return t;
}

PotentialTerm PotentialTerm::abs_term(TimeFn coef, std::vector<int> block) {
  PotentialTerm t;
  t.coef = std::move(coef);
  t.kind = Kind::abs_norm;
  t.block = std::move(block);
  return t;
}

PotentialTerm PotentialTerm::max_term(TimeFn coef,
                                      std::vector<SmoothSpatial> pieces) {
  PotentialTerm t;
  t.coef = std::move(coef);
  t.kind = Kind::max_of_smooth;
  t.pieces = std::move(pieces);
  return t;
}

Potential::Potential(int dim, std::vector<PotentialTerm> terms, double horizon)
    : dim_(dim), terms_(std::move(terms)), horizon_(horizon) {
  if (dim_ < 1) throw std::invalid_argument("Potential: dimension must be positive");
  if (!(horizon_ > 0.0)) throw std::invalid_argument("Potential: horizon must be positive");
  std::vector<const std::vector<int>*> abs_blocks;
  for (const auto& term : terms_) {
    if (!term.coef) throw std::invalid_argument("Potential: missing time coefficient");
    bool nonsmooth = false;
    switch (term.kind) {
      case PotentialTerm::Kind::smooth:
        if (!term.f.value || !term.f.grad)
          throw std::invalid_argument("Potential: smooth term needs value and gradient");
        break;
      case PotentialTerm::Kind::abs_norm:
        check_block(term.block, dim_, "Potential abs term");
        for (const auto* other : abs_blocks) {
          if (*other == term.block) continue;
          for (int c : term.block)
            if (std::find(other->begin(), other->end(), c) != other->end())
              throw std::invalid_argument(
                  "Potential: abs term blocks must be disjoint or identical");
        }
        abs_blocks.push_back(&term.block);
        nonsmooth = true;
        break;
      case PotentialTerm::Kind::max_of_smooth:
        if (term.pieces.empty())
          throw std::invalid_argument("Potential: max term needs at least one piece");
        for (const auto& p : term.pieces)
          if (!p.value || !p.grad)
            throw std::invalid_argument("Potential: max term piece needs value and gradient");
        nonsmooth = term.pieces.size() > 1;
        break;
    }
    if (!nonsmooth) continue;
    smooth_ = false;
    // Convexity of the nonsmooth pieces only combines with a nonnegative
    // coefficient; sample it across the horizon.
    const int m = 1024;
    for (int i = 0; i <= m; ++i) {
      const double t = horizon_ * static_cast<double>(i) / m;
      const double a = term.coef(t);
      if (!(a >= 0.0)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "Potential: nonsmooth term coefficient is negative at "
                      "t=%.6g (a=%.6g)",
                      t, a);
        throw std::invalid_argument(msg);
      }
    }
  }
}

double Potential::value(double t, ConstVecRef x) const {
  if (x.size() != dim_) throw std::invalid_argument("Potential::value: dimension mismatch");
  double total = 0.0;
  for (const auto& term : terms_) {
    const double a = term.coef(t);
    if (a == 0.0) continue;
    switch (term.kind) {
      case PotentialTerm::Kind::smooth:
        total += a * term.f.value(x);
        break;
      case PotentialTerm::Kind::abs_norm:
        total += a * gather(x, term.block).norm();
        break;
      case PotentialTerm::Kind::max_of_smooth: {
        double m = -kInf;
        for (const auto& p : term.pieces) m = std::max(m, p.value(x));
        total += a * m;
        break;
      }
    }
  }
  return total;
}

SubdiffSet Potential::subdiff(double t, ConstVecRef x) const {
  if (x.size() != dim_) throw std::invalid_argument("Potential::subdiff: dimension mismatch");
  Vec base = Vec::Zero(dim_);
  std::vector<BlockBall> balls;
  std::vector<Mat> hulls;
  for (const auto& term : terms_) {
    const double a = term.coef(t);
    if (a == 0.0) continue;
    switch (term.kind) {
      case PotentialTerm::Kind::smooth:
        base += a * term.f.grad(x);
        break;
      case PotentialTerm::Kind::abs_norm: {
        const Vec xb = gather(x, term.block);
        const double nb = xb.norm();
        if (nb == 0.0) {
          // Exact kink: the solver snaps candidate zeros, so the test is
          // reliable in practice.
          bool merged = false;
          for (auto& b : balls)
            if (b.coords == term.block) {
              b.radius += a;
              merged = true;
              break;
            }
          if (!merged) balls.push_back({term.block, a});
        } else {
          scatter_add(base, term.block, xb, a / nb);
        }
        break;
      }
      case PotentialTerm::Kind::max_of_smooth: {
        double m = -kInf;
        std::vector<double> vals(term.pieces.size());
        for (std::size_t j = 0; j < term.pieces.size(); ++j) {
          vals[j] = term.pieces[j].value(x);
          m = std::max(m, vals[j]);
        }
        const double tol = 1e-9 * (1.0 + std::abs(m));
        std::vector<int> active;
        for (std::size_t j = 0; j < term.pieces.size(); ++j)
          if (vals[j] >= m - tol) active.push_back(static_cast<int>(j));
        if (active.size() == 1) {
          base += a * term.pieces[active[0]].grad(x);
        } else {
          Mat hull(active.size(), dim_);
          for (std::size_t j = 0; j < active.size(); ++j)
            hull.row(static_cast<Eigen::Index>(j)) =
                (a * term.pieces[active[j]].grad(x)).transpose();
          hulls.push_back(std::move(hull));
        }
        break;
      }
    }
  }
  return SubdiffSet(dim_, std::move(base), std::move(balls), std::move(hulls));
}

double Potential::dirderiv(double t, ConstVecRef x, ConstVecRef v) const {
  return subdiff(t, x).support(v);
}

double Potential::smoothed_value(double t, ConstVecRef x, double mu) const {
  if (!(mu > 0.0)) throw std::invalid_argument("Potential::smoothed_value: mu must be positive");
  double total = 0.0;
  for (const auto& term : terms_) {
    const double a = term.coef(t);
    if (a == 0.0) continue;
    switch (term.kind) {
      case PotentialTerm::Kind::smooth:
        total += a * term.f.value(x);
        break;
      case PotentialTerm::Kind::abs_norm: {
        const double nb = gather(x, term.block).norm();
        total += a * (nb <= mu ? nb * nb / (2.0 * mu) + 0.5 * mu : nb);
        break;
      }
      case PotentialTerm::Kind::max_of_smooth: {
        double m = -kInf;
        std::vector<double> vals(term.pieces.size());
        for (std::size_t j = 0; j < term.pieces.size(); ++j) {
          vals[j] = term.pieces[j].value(x);
          m = std::max(m, vals[j]);
        }
        if (term.pieces.size() == 1) {
          total += a * m;
          break;
        }
        double s = 0.0;
        for (double v : vals) s += std::exp((v - m) / mu);
        total += a * (m + mu * std::log(s));
        break;
      }
    }
  }
  return total;
}

Vec Potential::smoothed_gradient(double t, ConstVecRef x, double mu) const {
  if (!(mu > 0.0)) throw std::invalid_argument("Potential::smoothed_gradient: mu must be positive");
  Vec g = Vec::Zero(dim_);
  for (const auto& term : terms_) {
    const double a = term.coef(t);
    if (a == 0.0) continue;
    switch (term.kind) {
      case PotentialTerm::Kind::smooth:
        g += a * term.f.grad(x);
        break;
      case PotentialTerm::Kind::abs_norm: {
        const Vec xb = gather(x, term.block);
        const double nb = xb.norm();
        if (nb > 0.0)
          scatter_add(g, term.block, xb, a / std::max(nb, mu));
        break;
      }
      case PotentialTerm::Kind::max_of_smooth: {
        if (term.pieces.size() == 1) {
          g += a * term.pieces[0].grad(x);
          break;
        }
        double m = -kInf;
        std::vector<double> vals(term.pieces.size());
        for (std::size_t j = 0; j < term.pieces.size(); ++j) {
          vals[j] = term.pieces[j].value(x);
          m = std::max(m, vals[j]);
        }
        double s = 0.0;
        std::vector<double> wgt(term.pieces.size());
        for (std::size_t j = 0; j < term.pieces.size(); ++j) {
          wgt[j] = std::exp((vals[j] - m) / mu);
          s += wgt[j];
        }
        for (std::size_t j = 0; j < term.pieces.size(); ++j)
          g += (a * wgt[j] / s) * term.pieces[j].grad(x);
        break;
      }
    }
  }
  return g;
}

double clarke_dirderiv(const Potential& F, double t, ConstVecRef x,
                       ConstVecRef v) {
  return F.dirderiv(t, x, v);
}

SubdiffSet subdiff(const Potential& F, double t, ConstVecRef x) {
  return F.subdiff(t, x);
}

double subdiff_distance(const Potential& F, double t, ConstVecRef x,
                        ConstVecRef r) {
  return F.subdiff(t, x).distance(r);
}

}  // namespace philap
