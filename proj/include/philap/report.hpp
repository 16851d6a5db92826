#pragma once

#include <optional>
#include <string>

#include "philap/config.hpp"
#include "philap/probes.hpp"
#include "philap/solver.hpp"

namespace philap {

// One command execution: the serialized JSON report plus the structured
// results for callers that want them.  Malformed configs throw
// std::invalid_argument before any output is produced.
struct RunOutput {
  std::string report_json;
  int exit_code = 0;
  std::optional<HypothesisReport> hypotheses;
  std::optional<SolveResult> solve;
};

// Conjugate sample table, doubling/scaling report, index estimates and the
// N-function check for phi (and phi0 when configured).  Exit 0.
RunOutput run_analyze(const Config& cfg);

// Full hypothesis probe suite with theorem verdicts.  Exit 0.
RunOutput run_check(const Config& cfg);

// Minimizes the discrete action, writes <out_dir>/solution.csv, and reports
// the verification outcome.  Exit 0 iff the solution verifies, else 2.
RunOutput run_solve(const Config& cfg, const std::string& out_dir);

// Solves at N, 2N, ..., 2^levels N (each level warm-started from the
// previous one), writes per-level trajectory CSVs, and estimates the
// empirical order from successive action differences.  Exit 0 iff every
// level converges and verifies, else 2.
RunOutput run_convergence(const Config& cfg, int levels,
                          const std::string& out_dir);

}  // namespace philap
