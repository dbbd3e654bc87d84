// Command-line driver: solve / verify / sweep / mms on a key-value config.
// Exit status: 0 = all selected checks pass, 2 = a check failed, 1 = error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference laboratory for the parabolic normalized p-Laplace flow"};
  app.require_subcommand(1);

  std::string config_path;
  plab::RunOptions opt;
  std::string out_dir = "out";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key = value)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", opt.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--levels", opt.levels, "refinement depth")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", opt.jobs, "parallel sweep workers")->check(CLI::PositiveNumber);
  };

  CLI::App* cmd_solve = app.add_subcommand("solve", "forward solve + error table");
  CLI::App* cmd_verify = app.add_subcommand("verify", "solve and run selected checks");
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "epsilon sweep checks");
  CLI::App* cmd_mms = app.add_subcommand("mms", "manufactured-solution convergence");
  for (auto* sub : {cmd_solve, cmd_verify, cmd_sweep, cmd_mms}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    plab::RunConfig config = plab::load_config(config_path);
    opt.out_dir = out_dir;
    if (app.got_subcommand(cmd_solve)) return plab::run_solve(config, opt);
    if (app.got_subcommand(cmd_verify)) return plab::run_verify(config, opt);
    if (app.got_subcommand(cmd_sweep)) return plab::run_sweep(config, opt);
    if (app.got_subcommand(cmd_mms)) return plab::run_mms(config, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
