#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "philap/report.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = ".";
  std::string seed;  // empty = keep config seeds
  bool json = false;
  int levels = 2;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "problem description file")
      ->required();
  cmd->add_option("--out", a.out,
                  "output directory for report.json and trajectory CSVs");
  cmd->add_option("--seed", a.seed, "override solver and probe seeds")
      ->check(CLI::Number);
  cmd->add_flag("--json", a.json, "print the JSON report to stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical workbench for periodic phi-Laplacian inclusions"};
  app.require_subcommand(1);
  Args a;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "conjugate table, growth report and index estimates");
  CLI::App* check =
      app.add_subcommand("check", "hypothesis probe suite with verdicts");
  CLI::App* solve =
      app.add_subcommand("solve", "minimize the discrete action and verify");
  CLI::App* convergence = app.add_subcommand(
      "convergence", "grid-doubling study of action and residuals");
  for (CLI::App* cmd : {analyze, check, solve, convergence})
    add_common(cmd, a);
  convergence->add_option("--levels", a.levels, "number of grid doublings")
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    philap::Config cfg = philap::Config::load_file(a.config);
    if (!a.seed.empty()) {
      cfg.set("solver.seed", a.seed);
      cfg.set("probes.seed", a.seed);
    }
    std::filesystem::create_directories(a.out);

    philap::RunOutput out;
    if (app.got_subcommand(analyze))
      out = philap::run_analyze(cfg);
    else if (app.got_subcommand(check))
      out = philap::run_check(cfg);
    else if (app.got_subcommand(solve))
      out = philap::run_solve(cfg, a.out);
    else
      out = philap::run_convergence(cfg, a.levels, a.out);

    std::ofstream report(a.out + "/report.json");
    report << out.report_json;
    if (!report)
      throw std::runtime_error("cannot write report to " + a.out);
    if (a.json) std::cout << out.report_json;
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
