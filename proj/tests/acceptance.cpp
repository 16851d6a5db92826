// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include "philap/config.hpp"
#include "philap/conjugate.hpp"
#include "philap/growth.hpp"
#include "philap/orlicz.hpp"
#include "philap/probes.hpp"
#include "philap/report.hpp"
#include "philap/sampling.hpp"
#include "philap/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace philap;

namespace {

int failures = 0;

void run(const std::string& label, const std::function<bool(std::string&)>& body) {
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (!ok) ++failures;
  std::printf("[%s] %s%s%s (%.2fs)\n", ok ? "pass" : "FAIL", label.c_str(),
              detail.empty() ? "" : ": ", detail.c_str(), secs);
  std::fflush(stdout);
}

std::string data_path(const std::string& name) {
  return std::string(PHILAP_TEST_DATA_DIR) + "/" + name;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("philap_gate_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

Trajectory random_trajectory(Sampler& s, double period, int nodes, int dim,
                             double scale) {
  Mat vals(nodes, dim);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < dim; ++j) vals(i, j) = s.uniform(-scale, scale);
  return Trajectory(period, std::move(vals));
}

bool conjugation_suite(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_conj = 0.0, worst_double = 0.0;
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const double pc = p / (p - 1.0);
    GFunction phi = GFunction::power(p, 2);
    GFunction twice = conjugate_function_numeric(conjugate_function_numeric(phi));
    Sampler s(1000 + static_cast<std::uint64_t>(10 * p));
    for (int k = 0; k < 200; ++k) {
      Vec xi = s.log_point(2, 1e-2, 1e2);
      const double expect = std::pow(xi.norm(), pc) / pc;
      const double got = conjugate_numeric(phi, xi).value;
      worst_conj = std::max(worst_conj,
                            std::abs(got - expect) / (1.0 + std::abs(expect)));
      const double orig = phi(xi);
      worst_double = std::max(
          worst_double, std::abs(twice(xi) - orig) / (1.0 + std::abs(orig)));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ostringstream os;
  os << "max rel err " << worst_conj << ", double-conjugate " << worst_double;
  detail = os.str();
  return worst_conj <= 1e-6 && worst_double <= 1e-5 && secs < 10.0;
}

bool inequality_suite(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> ps = {1.5, 2.0, 3.0, 5.0};

  double fy_min = kInf;
  Sampler fy(42);
  for (int k = 0; k < 1000; ++k) {
    GFunction phi = GFunction::power(ps[k % 4], 1 + k % 3);
    Vec x = fy.log_point(phi.dimension(), 1e-2, 1e2);
    Vec xi = fy.log_point(phi.dimension(), 1e-2, 1e2);
    fy_min = std::min(fy_min, fenchel_young_gap(phi, x, xi));
  }

  double holder_min = kInf;
  Sampler ho(43);
  for (int k = 0; k < 1000; ++k) {
    GFunction phi = GFunction::power(ps[k % 4], 1 + k % 2);
    const int nodes = 8 + 8 * (k % 8);
    Trajectory u = random_trajectory(ho, 2.0 * kPi, nodes, phi.dimension(), 3.0);
    Trajectory v = random_trajectory(ho, 2.0 * kPi, nodes, phi.dimension(), 3.0);
    holder_min = std::min(holder_min, holder_gap(phi, u, v));
  }

  double wirtinger_min = kInf, slack_max = 0.0;
  Sampler wi(44);
  for (int k = 0; k < 1000; ++k) {
    GFunction phi = GFunction::power(ps[k % 4], 1);
    const int nodes = 16 + 16 * (k % 4);
    Trajectory u = random_trajectory(wi, 2.0 * kPi, nodes, 1, 2.0);
    WirtingerGap g = wirtinger_gap(phi, u);
    wirtinger_min = std::min(wirtinger_min, g.gap + g.slack);
    slack_max = std::max(slack_max, g.slack);
  }

  double amemiya_min = kInf;
  Sampler am(45);
  for (int k = 0; k < 1000; ++k) {
    GFunction phi = GFunction::power(ps[k % 4], 1 + k % 2);
    const int nodes = 8 + 8 * (k % 8);
    Trajectory u = random_trajectory(am, 2.0 * kPi, nodes, phi.dimension(), 4.0);
    amemiya_min = std::min(amemiya_min, amemiya_bound_gap(phi, u));
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ostringstream os;
  os << "min gaps: fenchel-young " << fy_min << ", holder " << holder_min
     << ", wirtinger+slack " << wirtinger_min << " (max slack " << slack_max
     << "), modular-norm " << amemiya_min;
  detail = os.str();
  return fy_min >= -1e-7 && holder_min >= -1e-6 && wirtinger_min >= -1e-12 &&
         amemiya_min >= -1e-8 && secs < 60.0;
}

bool index_suite(std::string& detail) {
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    IndexEstimate e = matuszewska_indices(GFunction::power(p, 2));
    worst = std::max({worst, std::abs(e.alpha - p), std::abs(e.beta - p)});
  }
  IndexEstimate blk = matuszewska_indices(GFunction::block({2.0, 4.0}, {1, 1}));
  worst = std::max({worst, std::abs(blk.alpha - 2.0), std::abs(blk.beta - 4.0)});

  double worst_identity = 0.0;
  std::vector<GFunction> duals;
  duals.push_back(GFunction::power(1.5, 1));
  duals.push_back(GFunction::power(3.0, 1));
  duals.push_back(GFunction::block({2.0, 4.0}, {1, 1}));
  for (const auto& phi : duals) {
    IndexEstimate base = matuszewska_indices(phi);
    IndexEstimate dual = matuszewska_indices(conjugate_function(phi));
    worst_identity = std::max(
        worst_identity, std::abs(1.0 / base.alpha + 1.0 / dual.beta - 1.0));
  }
  std::ostringstream os;
  os << "max index dev " << worst << ", identity dev " << worst_identity;
  detail = os.str();
  return worst <= 0.05 && worst_identity <= 0.03;
}

double smooth_linf_error(const Config& cfg, int nodes) {
  Config c = cfg;
  c.set("problem.nodes", std::to_string(nodes));
  ProblemSetup setup = build_problem(c);
  DiscreteProblem prob(setup.phi, *setup.F, setup.period, nodes, setup.solver);
  SolveResult res = minimize(prob);
  if (!res.converged) return kInf;
  Trajectory exact = Trajectory::sample(setup.period, nodes, 1, [](double t) {
    Vec v(1);
    v << -0.5 * std::cos(t);
    return v;
  });
  return (res.u.values() - exact.values()).cwiseAbs().maxCoeff();
}

bool smooth_benchmark(std::string& detail) {
  Config cfg = Config::load_file(data_path("smooth_benchmark.conf"));
  const double e256 = smooth_linf_error(cfg, 256);
  const double e512 = smooth_linf_error(cfg, 512);
  const double order = std::log2(e256 / e512);
  std::ostringstream os;
  os << "L-inf error " << e256 << " at N=256, doubling order " << order;
  detail = os.str();
  return e256 <= 5e-3 && order >= 1.0;
}

bool kink_benchmark(std::string& detail) {
  Config cfg = Config::load_file(data_path("kink.conf"));
  ProblemSetup setup = build_problem(cfg);
  DiscreteProblem prob(setup.phi, *setup.F, setup.period, setup.nodes,
                       setup.solver);
  SolveResult res = minimize(prob);
  std::ostringstream os;
  os << "sup norm " << res.u.values().cwiseAbs().maxCoeff() << ", residual "
     << res.stats.max;
  detail = os.str();
  return res.converged && res.u.values().cwiseAbs().maxCoeff() <= 1e-2 &&
         res.stats.max == 0.0;
}

bool worked_power_example(std::string& detail) {
  Config cfg = Config::load_file(data_path("plap_worked.conf"));
  RunOutput check = run_check(cfg);
  if (!check.hypotheses) {
    detail = "no hypothesis report";
    return false;
  }
  for (const char* name : {"H1", "H2", "H3", "H4", "H5"}) {
    const ProbeResult* e = find_entry(*check.hypotheses, name);
    if (!e || e->status != ProbeStatus::pass) {
      detail = std::string(name) + " did not pass";
      return false;
    }
  }
  ProblemSetup setup = build_problem(cfg);
  if (setup.nodes != 512) {
    detail = "expected the 512-node grid";
    return false;
  }
  DiscreteProblem prob(setup.phi, *setup.F, setup.period, setup.nodes,
                       setup.solver);
  SolveResult res = minimize(prob);
  std::ostringstream os;
  os << "probes pass, max residual " << res.stats.max << " at N=512";
  detail = os.str();
  return res.converged && res.stats.max <= 1e-3;
}

bool worked_block_example(std::string& detail) {
  Config cfg = Config::load_file(data_path("block_example.conf"));
  RunOutput check = run_check(cfg);
  if (!check.hypotheses) {
    detail = "no hypothesis report";
    return false;
  }
  const auto& passing = check.hypotheses->theorems_passing;
  if (std::find(passing.begin(), passing.end(), "theorem1") == passing.end()) {
    detail = "theorem1 verdict missing";
    return false;
  }
  ProblemSetup setup = build_problem(cfg);
  for (const char* name : {"pasca1", "pasca2"}) {
    const ProbeResult* e = find_entry(*check.hypotheses, name);
    if (!e || e->status != ProbeStatus::fail || !e->witness) {
      detail = std::string(name) + " did not fail with a witness";
      return false;
    }
    // Recheck the witness against the potential itself: the block component
    // of the gradient must reproduce the reported violation.
    const ProbeWitness& w = *e->witness;
    const std::vector<int>& block = std::string(name) == "pasca1"
                                        ? setup.probes.pasca_block1
                                        : setup.probes.pasca_block2;
    std::vector<int> coords = block;
    if (coords.empty()) coords = {std::string(name) == "pasca1" ? 0 : 1};
    Vec g = setup.F->subdiff(w.t, w.x).base();
    double nb = 0.0;
    for (int c : coords) nb += g(c) * g(c);
    nb = std::sqrt(nb);
    if (std::abs(nb - w.lhs) > 1e-6 * (1.0 + w.lhs) || !(w.lhs > w.rhs)) {
      detail = std::string(name) + " witness does not recheck";
      return false;
    }
  }
  detail = "theorem1 passes, both block growth bounds refuted with witnesses";
  return true;
}

bool parts_identity(std::string& detail) {
  GFunction phi = GFunction::power(3.0, 2);
  Sampler s(7);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 8 + (k % 12) * 8;
    Trajectory u = random_trajectory(s, 2.0, n, 2, 2.0);
    Trajectory v = random_trajectory(s, 2.0, n, 2, 2.0);
    Trajectory du = u.derivative();
    Trajectory dv = v.derivative();
    const double h = u.h();
    double lhs = 0.0, rhs = 0.0, scale = 1.0;
    for (int i = 0; i < n; ++i) {
      Vec w = phi.gradient(du.node(i));
      Vec wm = phi.gradient(du.node((i + n - 1) % n));
      lhs += h * w.dot(dv.node(i));
      rhs -= h * ((w - wm) / h).dot(v.node(i));
      scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
    }
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  std::ostringstream os;
  os << "max relative defect " << worst << " over 100 pairs";
  detail = os.str();
  return worst <= 1e-12;
}

bool deterministic_reports(std::string& detail) {
  Config cfg = Config::load_file(data_path("smooth_benchmark.conf"));
  auto d1 = scratch("a");
  auto d2 = scratch("b");
  RunOutput a = run_solve(cfg, d1.string());
  RunOutput b = run_solve(cfg, d2.string());
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
  detail = a.report_json == b.report_json ? "byte-identical reports"
                                          : "reports differ";
  return a.report_json == b.report_json && a.exit_code == 0;
}

}  // namespace

int main() {
  run("criterion 1: numeric conjugates match closed forms", conjugation_suite);
  run("criterion 2: inequality gaps stay nonnegative", inequality_suite);
  run("criterion 3: scaling indices and conjugate identity", index_suite);
  run("criterion 4: forced quadratic benchmark", smooth_benchmark);
  run("criterion 5: kink benchmark snaps to zero", kink_benchmark);
  run("criterion 6a: power-law worked example", worked_power_example);
  run("criterion 6b: coupled block worked example", worked_block_example);
  run("criterion 7: discrete integration by parts", parts_identity);
  run("criterion 8: deterministic solve reports", deterministic_reports);
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
