#pragma once

#include "philap/common.hpp"

#include <functional>
#include <iosfwd>
#include <string>

namespace philap {

// Uniform periodic grid trajectory on [0, T): N nodes, row i holds u(t_i),
// t_i = i T / N.  Node N wraps to node 0.
class Trajectory {
 public:
  Trajectory(double period, Mat values);

  static Trajectory constant(double period, int nodes, ConstVecRef c);
  static Trajectory sample(double period, int nodes, int dim,
                           const std::function<Vec(double)>& u);

  int nodes() const { return static_cast<int>(values_.rows()); }
  int dimension() const { return static_cast<int>(values_.cols()); }
  double period() const { return period_; }
  double h() const { return period_ / nodes(); }
  double time(int i) const { return h() * i; }

  const Mat& values() const { return values_; }
  Mat& values() { return values_; }
  Vec node(int i) const { return values_.row(i).transpose(); }

  // Forward-difference derivative trajectory: u'_i = (u_{i+1} - u_i)/h with
  // periodic wraparound; same grid.
  Trajectory derivative() const;

  // Mean value (h/T) sum u_i = average of the rows.
  Vec mean() const;

 private:
  double period_;
  Mat values_;
};

// CSV exchange format: header "t,u1,...,un", one row per node, node 0 first.
void write_trajectory_csv(const Trajectory& u, std::ostream& os);
void write_trajectory_csv_file(const Trajectory& u, const std::string& path);
// Rejects ragged rows and non-uniform grids (tolerance 1e-9 * T).
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv_file(const std::string& path);

}  // namespace philap
