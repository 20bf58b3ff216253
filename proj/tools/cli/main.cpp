#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using canreg::cli::Invocation;

  CLI::App app{"Canonical inner bound of multiterminal source coding"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Invocation inv;
  std::string out_path;
  std::uint64_t seed = 42;
  double tol = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("problem", inv.problem, "Problem file (JSON)")->required();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--tol", tol, "Tolerance (suite-specific default)");
    sub->add_option("--grid", inv.config.grid, "Oracle lattice resolution")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--sweeps", inv.config.sweeps, "Coordinate-descent sweeps")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--candidates", inv.config.candidates, "Random candidates per channel update")->capture_default_str();
    sub->add_option("--restarts", inv.config.restarts, "Multi-start restarts")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--budget", inv.config.budget, "Oracle evaluation budget")->capture_default_str();
    sub->add_option("--out", out_path, "Write JSON-lines records here");
  };

  auto* extreme = app.add_subcommand("extreme-points", "Enumerate the M! corner points for one channel set");
  common(extreme);
  extreme->add_option("--channels", inv.config.channels, "random | identity | constant | PATH")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", inv.suite, "identities | noncrossing | decomposition | alphabet-bound")
      ->required()
      ->check(CLI::IsMember({"identities", "noncrossing", "decomposition", "alphabet-bound"}));
  common(verify);
  std::size_t trials = 0;
  verify->add_option("--trials", trials, "Draws, instances or directions (suite-specific default)");

  auto* trace = app.add_subcommand("trace", "Trace extreme points of the inner bound");
  common(trace);
  trace->add_option("--directions", inv.config.directions, "File with one direction per line");
  trace->add_option("--sweep", inv.config.sweep, "Quarter circle A,B:N over two coordinates, e.g. R1,D1:17");
  trace->add_option("--perm", inv.config.perm, "Corner permutation, 1-based, e.g. 2,1,3");
  trace->add_option("--csv", inv.config.csv, "Also write a CSV table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : canreg::cli::kExitInput;
  }

  for (auto* sub : {extreme, verify, trace}) {
    if (sub->parsed()) inv.command = sub->get_name();
  }
  inv.config.seed = seed;
  for (auto* sub : {extreme, verify, trace}) {
    if (sub->parsed() && sub->count("--tol")) inv.config.tol = tol;
  }
  if (verify->parsed() && verify->count("--trials")) inv.config.trials = trials;
  return canreg::cli::execute(inv, out_path, std::cout, std::cerr);
}
