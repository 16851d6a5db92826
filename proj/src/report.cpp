#include "philap/report.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "philap/conjugate.hpp"
#include "philap/growth.hpp"
#include "philap/sampling.hpp"
#include "philap/trajectory.hpp"

namespace philap {

namespace {

using json = nlohmann::ordered_json;

// JSON has no inf/nan literals; encode them as strings so reports stay
// parseable and byte-stable.
json jnum(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json jvec(ConstVecRef v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(jnum(v[i]));
  return a;
}

json jtrend(const std::vector<std::pair<double, double>>& rows) {
  json a = json::array();
  for (const auto& [r, v] : rows) a.push_back(json::array({jnum(r), jnum(v)}));
  return a;
}

json config_echo(const Config& cfg) {
  json o = json::object();
  for (const auto& [k, v] : cfg.entries()) o[k] = v;
  return o;
}

json function_analysis(const GFunction& f, std::uint64_t seed) {
  json o;
  o["family"] = f.family();
  o["dimension"] = f.dimension();
  o["n_function"] = f.is_n_function();
  o["strictly_convex"] = f.strictly_convex();
  if (auto issue = validate_gfunction(f, seed))
    o["validation"] = *issue;
  else
    o["validation"] = nullptr;

  json table = json::array();
  Vec e1 = Vec::Zero(f.dimension());
  e1[0] = 1.0;
  for (double r : log_grid(1e-2, 1e2, 25)) {
    const Vec x = r * e1;
    const ConjugateResult c = conjugate(f, x);
    json row;
    row["r"] = jnum(r);
    row["value"] = jnum(f.value(x));
    row["conjugate"] = c.finite
                           ? jnum(c.value)
                           : json("inf");
    table.push_back(std::move(row));
  }
  o["conjugate_table"] = std::move(table);

  const GrowthReport g = delta2_report(f, 1e3, 400, seed);
  json d2;
  d2["constant"] = jnum(g.delta2_constant);
  d2["unbounded"] = g.delta2_unbounded;
  d2["trend"] = jtrend(g.radius_trend);
  o["delta2"] = std::move(d2);
  json n2;
  n2["found"] = g.nabla2_found;
  n2["l"] = g.nabla2_l;
  n2["C"] = jnum(g.nabla2_C);
  o["nabla2"] = std::move(n2);

  const IndexEstimate idx = matuszewska_indices(f, seed);
  json ix;
  ix["alpha"] = jnum(idx.alpha);
  ix["beta"] = jnum(idx.beta);
  ix["degenerate"] = idx.degenerate;
  o["indices"] = std::move(ix);
  return o;
}

json witness_json(const ProbeWitness& w) {
  json o;
  o["t"] = jnum(w.t);
  if (w.x.size() > 0) o["x"] = jvec(w.x);
  if (w.y.size() > 0) o["y"] = jvec(w.y);
  if (w.xi.size() > 0) o["xi"] = jvec(w.xi);
  o["lhs"] = jnum(w.lhs);
  o["rhs"] = jnum(w.rhs);
  if (!w.note.empty()) o["note"] = w.note;
  return o;
}

json hypotheses_json(const HypothesisReport& report) {
  json entries = json::array();
  for (const ProbeResult& e : report.entries) {
    json o;
    o["name"] = e.name;
    o["status"] = to_string(e.status);
    o["summary"] = e.summary;
    if (e.status == ProbeStatus::pass) o["strong"] = e.strong;
    if (!e.meta.empty()) {
      json m = json::object();
      for (const auto& [k, v] : e.meta) m[k] = jnum(v);
      o["meta"] = std::move(m);
    }
    if (!e.trend.empty()) o["trend"] = jtrend(e.trend);
    if (e.witness) o["witness"] = witness_json(*e.witness);
    entries.push_back(std::move(o));
  }
  json o;
  o["entries"] = std::move(entries);
  o["theorems_passing"] = report.theorems_passing;
  return o;
}

HypothesisReport run_suite(const ProblemSetup& setup) {
  SuiteInputs in;
  in.phi = &setup.phi;
  if (setup.phi0) in.phi0 = &*setup.phi0;
  if (setup.F) in.F = &*setup.F;
  in.b = setup.b;
  in.d = setup.d;
  in.lambda = setup.lambda;
  in.mu = setup.mu;
  in.pasca_p = setup.pasca_p;
  in.pasca_q = setup.pasca_q;
  in.pasca_alphas = setup.pasca_alphas;
  in.params = setup.probes;
  return run_hypothesis_suite(in);
}

Potential configured_potential(const ProblemSetup& setup) {
  if (setup.F) return *setup.F;
  return Potential(setup.phi.dimension(), {}, setup.period);
}

json residual_json(const ResidualStats& s) {
  json o;
  o["max"] = jnum(s.max);
  o["mean"] = jnum(s.mean);
  o["mean_condition"] = jnum(s.mean_condition);
  o["periodicity_gap"] = jnum(s.periodicity_gap);
  return o;
}

json solve_json(const DiscreteProblem& prob, const SolveResult& res,
                const VerifyReport& ver, const std::string& csv_name) {
  json o;
  o["nodes"] = prob.nodes();
  o["period"] = jnum(prob.period());
  o["dimension"] = prob.dimension();
  o["action"] = jnum(res.action_value);
  o["converged"] = res.converged;
  o["iterations"] = res.iterations;
  o["restarts_used"] = res.restarts_used;
  o["best_start"] = res.best_start;
  o["residual"] = residual_json(res.stats);
  o["verified"] = ver.verified;
  o["residual_ok"] = ver.residual_ok;
  o["mean_ok"] = ver.mean_ok;
  o["strictly_convex"] = ver.strictly_convex;
  o["trajectory_csv"] = csv_name;
  return o;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

// Nodewise injection onto the doubled grid; midpoints interpolate linearly
// (periodic wrap for the last one).
Trajectory refine(const Trajectory& u) {
  const int n = u.nodes();
  Mat fine(2 * n, u.dimension());
  for (int i = 0; i < n; ++i) {
    fine.row(2 * i) = u.values().row(i);
    fine.row(2 * i + 1) =
        0.5 * (u.values().row(i) + u.values().row((i + 1) % n));
  }
  return Trajectory(u.period(), std::move(fine));
}

}  // namespace

RunOutput run_analyze(const Config& cfg) {
  const ProblemSetup setup = build_problem(cfg);
  json doc;
  doc["config_echo"] = config_echo(cfg);
  json analysis;
  analysis["phi"] = function_analysis(setup.phi, setup.probes.seed);
  if (setup.phi0)
    analysis["phi0"] = function_analysis(*setup.phi0, setup.probes.seed);
  doc["analysis"] = std::move(analysis);
  RunOutput out;
  out.report_json = dump(doc);
  return out;
}

RunOutput run_check(const Config& cfg) {
  const ProblemSetup setup = build_problem(cfg);
  RunOutput out;
  out.hypotheses = run_suite(setup);
  json doc;
  doc["config_echo"] = config_echo(cfg);
  doc["hypotheses"] = hypotheses_json(*out.hypotheses);
  out.report_json = dump(doc);
  return out;
}

RunOutput run_solve(const Config& cfg, const std::string& out_dir) {
  const ProblemSetup setup = build_problem(cfg);
  const DiscreteProblem prob(setup.phi, configured_potential(setup),
                             setup.period, setup.nodes, setup.solver);
  RunOutput out;
  out.solve = minimize(prob);
  const VerifyReport ver = verify_solution(prob, out.solve->u);
  write_trajectory_csv_file(out.solve->u, out_dir + "/solution.csv");
  json doc;
  doc["config_echo"] = config_echo(cfg);
  doc["solve"] = solve_json(prob, *out.solve, ver, "solution.csv");
  out.report_json = dump(doc);
  out.exit_code = ver.verified ? 0 : 2;
  return out;
}

RunOutput run_convergence(const Config& cfg, int levels,
                          const std::string& out_dir) {
  if (levels < 0) throw std::invalid_argument("convergence: levels must be >= 0");
  const ProblemSetup setup = build_problem(cfg);
  const Potential F = configured_potential(setup);

  json rows = json::array();
  std::vector<double> actions;
  bool all_ok = true;
  std::optional<Trajectory> warm;
  RunOutput out;
  for (int lvl = 0; lvl <= levels; ++lvl) {
    const int nodes = setup.nodes << lvl;
    const DiscreteProblem prob(setup.phi, F, setup.period, nodes,
                               setup.solver);
    SolveResult res = warm ? minimize(prob, *warm) : minimize(prob);
    const VerifyReport ver = verify_solution(prob, res.u);
    const std::string csv_name = "solution_" + std::to_string(nodes) + ".csv";
    write_trajectory_csv_file(res.u, out_dir + "/" + csv_name);
    json row;
    row["nodes"] = nodes;
    row["h"] = jnum(prob.h());
    row["action"] = jnum(res.action_value);
    row["residual_max"] = jnum(res.stats.max);
    row["converged"] = res.converged;
    row["verified"] = ver.verified;
    row["trajectory_csv"] = csv_name;
    rows.push_back(std::move(row));
    actions.push_back(res.action_value);
    all_ok = all_ok && res.converged && ver.verified;
    warm = refine(res.u);
    out.solve = std::move(res);  // finest level wins
  }

  // Order from successive action differences: halving h should shrink the
  // increment by 2^order.
  json orders = json::array();
  for (std::size_t i = 0; i + 2 < actions.size(); ++i) {
    const double d1 = std::abs(actions[i + 1] - actions[i]);
    const double d2 = std::abs(actions[i + 2] - actions[i + 1]);
    if (d1 > 0.0 && d2 > 0.0)
      orders.push_back(jnum(std::log2(d1 / d2)));
    else
      orders.push_back(nullptr);
  }

  json doc;
  doc["config_echo"] = config_echo(cfg);
  json conv;
  conv["levels"] = levels;
  conv["rows"] = std::move(rows);
  conv["action_orders"] = std::move(orders);
  doc["convergence"] = std::move(conv);
  out.report_json = dump(doc);
  out.exit_code = all_ok ? 0 : 2;
  return out;
}

}  // namespace philap
