// afp: command-line front end over afp::execute.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "afp/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Approximate fixed points of cyclical maps on G-metric spaces", "afp"};
  app.set_version_flag("--version", "afp 0.1.0");

  std::string command;
  std::string spec_path;
  afp::RunFlags flags;
  std::string json_path, csv_path;

  app.add_option("command", command, "check | classify | solve | fset | verify | report")
      ->required()
      ->check(CLI::IsMember({"check", "classify", "solve", "fset", "verify", "report"}));
  app.add_option("spec", spec_path, "problem file")->required();
  app.add_option("--epsilon", flags.epsilon, "tolerance (default: the spec's epsilon list)")
      ->check(CLI::PositiveNumber);
  app.add_option("--x0", flags.x0, "starting point for solve");
  app.add_option("--k", flags.k, "measure displacement k steps apart (solve)")->check(CLI::PositiveNumber);
  app.add_option("--grid", flags.grid, "grid step h")->check(CLI::PositiveNumber);
  app.add_option("--budget", flags.budget, "pair budget for classification")->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "seed for sampled sweeps");
  app.add_option("--json", json_path, "write the JSON report here");
  app.add_option("--csv", csv_path, "write the solve trace (or F_eps members) as CSV");
  app.add_flag("--strict", flags.strict, "treat warnings as failures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : afp::kExitParse;
  }
  if (!json_path.empty()) flags.json_path = json_path;
  if (!csv_path.empty()) flags.csv_path = csv_path;

  const afp::RunReport report = afp::execute(*afp::command_from_name(command), spec_path, flags);
  std::cout << afp::render_text(report);
  return report.exit_code;
}
