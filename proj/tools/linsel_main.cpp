// Command-line front end: diagnose a problem file and emit the report,
// optional solution CSV and bundle dump.
//
// Exit codes: 0 solution constructed, 1 no continuous solution,
// 2 not certified at this resolution, >2 usage or runtime error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "linsel/pipeline.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw linsel::Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw linsel::Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and diagnoser for parametric linear systems "
               "A(x) phi(x) = gamma(x) over a sampled compact domain"};
  app.require_subcommand(1);

  std::string problem_path;
  int resolution = 101;
  linsel::DiagnoseConfig cfg;
  std::string out_path, csv_path, dump_path;

  CLI::App* diag = app.add_subcommand(
      "diagnose", "Decide continuous solvability and construct a solution");
  diag->add_option("problem-file", problem_path, "Problem document (JSON)")
      ->required();
  diag->add_option("--resolution", resolution,
                   "Grid points per axis (>= 2)");
  diag->add_option("--tol-rank", cfg.tol.tol_rank, "Rank tolerance");
  diag->add_option("--tol-res", cfg.tol.tol_res, "Consistency tolerance");
  diag->add_option("--shell-c", cfg.refine.shell_c,
                   "Refinement survival tolerance factor: eps(rho) = c*rho");
  diag->add_option("--theta", cfg.cover.theta,
                   "Discontinuity scan jump threshold factor");
  diag->add_option("--out", out_path, "Write the JSON report here");
  diag->add_option("--solution-csv", csv_path,
                   "Write per-sample solution values and residuals (CSV)");
  diag->add_option("--bundle-dump", dump_path,
                   "Write the stable bundle as JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; genuine usage errors map above 2.
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    linsel::Problem problem = linsel::parse_problem(read_file(problem_path));
    cfg.resolution.assign(problem.ambient_dim, resolution);

    linsel::DiagnoseResult result = linsel::diagnose(problem, cfg);
    const std::string report = result.report.to_json();

    if (!out_path.empty())
      write_file(out_path, report + "\n");
    std::cout << report << std::endl;

    if (!csv_path.empty() && result.solution) {
      std::ofstream csv(csv_path);
      if (!csv) throw linsel::Error("cannot write '" + csv_path + "'");
      linsel::solution_csv(*result.solution, *result.domain, problem,
                           cfg.tol, csv);
    }
    if (!dump_path.empty() && result.stable) {
      std::ofstream dump(dump_path);
      if (!dump) throw linsel::Error("cannot write '" + dump_path + "'");
      linsel::dump_bundle(*result.stable, dump);
    }
    return linsel::verdict_exit_code(result.report.verdict);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  }
}
