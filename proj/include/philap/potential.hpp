#pragma once

#include "philap/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace philap {

using TimeFn = std::function<double(double)>;

// Euclidean ball of the given radius living in the subspace spanned by the
// listed coordinates.
struct BlockBall {
  std::vector<int> coords;
  double radius = 0.0;
};

// Convex compact set: base + sum of block balls + Minkowski sum of vertex
// hulls.  Constructed by Potential::subdiff; distinct balls never share
// coordinates (identical blocks are merged at assembly).
class SubdiffSet {
 public:
  SubdiffSet(int dim, Vec base, std::vector<BlockBall> balls,
             std::vector<Mat> hulls);

  int dimension() const { return dim_; }
  const Vec& base() const { return base_; }
  const std::vector<BlockBall>& balls() const { return balls_; }
  // Rows of each matrix are hull vertices, as offsets added to the base.
  const std::vector<Mat>& hulls() const { return hulls_; }
  bool singleton() const { return balls_.empty() && hulls_.empty(); }

  // Support function sup{<s, v> : s in set}; equals the Clarke directional
  // derivative when the set is a subdifferential of a regular function.
  double support(ConstVecRef v) const;
  // max{|s| : s in set}, exact for this structure.
  double max_norm() const;
  // Euclidean distance from r to the set.  Closed form when no hulls are
  // present; otherwise alternating exact block projections (closed-form ball
  // step, face-enumeration hull step) with a support-function duality gap as
  // the optimality certificate (tolerance 1e-9, at most 10k sweeps; throws on
  // non-convergence).
  double distance(ConstVecRef r) const;
  // Nearest point of the set to r.
  Vec project(ConstVecRef r) const;
  Vec min_norm_element() const { return project(Vec::Zero(dim_)); }
  bool contains(ConstVecRef r, double tol = 1e-9) const {
    return distance(r) <= tol;
  }
  // Deterministic sample of extreme points: hull vertex tuples crossed with
  // ball boundary directions (block axes plus `extra_dirs` seeded ones).
  std::vector<Vec> extreme_points(int extra_dirs, std::uint64_t seed) const;

 private:
  int dim_;
  Vec base_;
  std::vector<BlockBall> balls_;
  std::vector<Mat> hulls_;
};

struct SmoothSpatial {
  std::function<double(ConstVecRef)> value;
  std::function<Vec(ConstVecRef)> grad;
};

struct PotentialTerm {
  enum class Kind { smooth, abs_norm, max_of_smooth };

  TimeFn coef;  // a_j(t)
  Kind kind = Kind::smooth;
  SmoothSpatial f;                   // smooth
  std::vector<int> block;            // abs_norm: |x_B|
  std::vector<SmoothSpatial> pieces;  // max_of_smooth

  static PotentialTerm smooth_term(TimeFn coef, SmoothSpatial f);
  static PotentialTerm abs_term(TimeFn coef, std::vector<int> block);
  static PotentialTerm max_term(TimeFn coef, std::vector<SmoothSpatial> pieces);
};

// Sum of time-modulated spatial terms F(t,x) = sum_j a_j(t) s_j(x), regular
// by construction (smooth pieces plus convex nonsmooth pieces with
// nonnegative coefficients).  Coefficients of nonsmooth terms are sampled on
// [0, horizon] at construction and rejected if negative anywhere on the
// sample.
class Potential {
 public:
  Potential(int dim, std::vector<PotentialTerm> terms, double horizon);

  int dimension() const { return dim_; }
  const std::vector<PotentialTerm>& terms() const { return terms_; }
  bool smooth() const { return smooth_; }
  bool regular() const { return true; }
  double horizon() const { return horizon_; }

  double value(double t, ConstVecRef x) const;
  SubdiffSet subdiff(double t, ConstVecRef x) const;
  // Generalized directional derivative at (t, x) in direction v; exact via
  // the support function of the subdifferential set.
  double dirderiv(double t, ConstVecRef x, ConstVecRef v) const;

  // C^1 surrogate used by the solver continuation: |x_B| becomes a Huber
  // function with parameter mu, max terms a mu-scaled softmax.  mu > 0.
  double smoothed_value(double t, ConstVecRef x, double mu) const;
  Vec smoothed_gradient(double t, ConstVecRef x, double mu) const;

 private:
  int dim_;
  std::vector<PotentialTerm> terms_;
  double horizon_;
  bool smooth_ = true;
};

double clarke_dirderiv(const Potential& F, double t, ConstVecRef x,
                       ConstVecRef v);
SubdiffSet subdiff(const Potential& F, double t, ConstVecRef x);
double subdiff_distance(const Potential& F, double t, ConstVecRef x,
                        ConstVecRef r);

}  // namespace philap
