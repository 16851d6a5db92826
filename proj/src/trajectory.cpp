#include "philap/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace philap {

Trajectory::Trajectory(double period, Mat values)
    : period_(period), values_(std::move(values)) {
  if (!(period_ > 0.0))
    throw std::invalid_argument("Trajectory: period must be positive");
  if (values_.rows() < 4)
    throw std::invalid_argument("Trajectory: at least 4 nodes required");
  if (values_.cols() < 1)
    throw std::invalid_argument("Trajectory: dimension must be positive");
  if (!values_.allFinite())
    throw std::invalid_argument("Trajectory: values must be finite");
}

Trajectory Trajectory::constant(double period, int nodes, ConstVecRef c) {
  Mat v(nodes, c.size());
  v.rowwise() = c.transpose();
  return Trajectory(period, std::move(v));
}

Trajectory Trajectory::sample(double period, int nodes, int dim,
                              const std::function<Vec(double)>& u) {
  Mat v(nodes, dim);
  for (int i = 0; i < nodes; ++i) {
    v.row(i) = u(period * i / nodes).transpose();
  }
  return Trajectory(period, std::move(v));
}

Trajectory Trajectory::derivative() const {
  const int N = nodes();
  Mat d(N, dimension());
  const double invh = 1.0 / h();
  for (int i = 0; i < N; ++i) {
    d.row(i) = (values_.row((i + 1) % N) - values_.row(i)) * invh;
  }
  return Trajectory(period_, std::move(d));
}

Vec Trajectory::mean() const {
  return values_.colwise().mean().transpose();
}

void write_trajectory_csv(const Trajectory& u, std::ostream& os) {
  const int n = u.dimension();
  os << "t";
  for (int j = 1; j <= n; ++j) os << ",u" << j;
  os << "\n";
  char buf[32];
  for (int i = 0; i < u.nodes(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", u.time(i));
    os << buf;
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", u.values()(i, j));
      os << "," << buf;
    }
    os << "\n";
  }
}

void write_trajectory_csv_file(const Trajectory& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_trajectory_csv(u, os);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("trajectory csv: empty input");
  // Header: t,u1,...,un
  int n = 0;
  {
    std::stringstream h(line);
    std::string tok;
    if (!std::getline(h, tok, ',') || tok != "t")
      throw std::invalid_argument("trajectory csv: header must start with t");
    while (std::getline(h, tok, ',')) ++n;
    if (n < 1)
      throw std::invalid_argument("trajectory csv: no value columns");
  }
  std::vector<double> times;
  std::vector<double> data;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string tok;
    int col = -1;
    while (std::getline(row, tok, ',')) {
      double v;
      try {
        v = std::stod(tok);
      } catch (const std::exception&) {
        throw std::invalid_argument("trajectory csv: bad number '" + tok +
                                    "'");
      }
      if (col < 0)
        times.push_back(v);
      else
        data.push_back(v);
      ++col;
    }
    if (col != n)
      throw std::invalid_argument("trajectory csv: ragged row");
  }
  const int N = static_cast<int>(times.size());
  if (N < 4)
    throw std::invalid_argument("trajectory csv: at least 4 nodes required");
  const double h = times[1] - times[0];
  const double T = h * N;
  if (!(T > 0.0))
    throw std::invalid_argument("trajectory csv: nonpositive period");
  for (int i = 0; i < N; ++i) {
    if (std::abs(times[i] - h * i) > 1e-9 * T)
      throw std::invalid_argument(
          "trajectory csv: non-uniform grid at row " + std::to_string(i));
  }
  Mat v(N, n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = data[i * n + j];
  return Trajectory(T, std::move(v));
}

Trajectory read_trajectory_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_trajectory_csv(is);
}

}  // namespace philap
