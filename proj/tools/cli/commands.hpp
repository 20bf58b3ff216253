#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "canreg/optimizer.hpp"
#include "report.hpp"

namespace canreg::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInput = 2, kExitBudget = 3 };

struct Config {
  std::uint64_t seed = 42;
  std::optional<double> tol;
  std::size_t grid = 12;
  std::size_t sweeps = 50;
  std::size_t candidates = 64;
  std::size_t restarts = 8;
  std::optional<std::size_t> trials;
  double budget = kOracleBudget;
  std::string channels = "random";  // extreme-points: random | identity | constant | PATH
  std::string directions;           // trace: file with one direction per line
  std::string sweep;                // trace: "A,B:N" quarter circle
  std::string perm;                 // trace: 1-based, comma separated
  std::string csv;                  // trace: optional table for plotting
};

struct Invocation {
  std::string command;  // extreme-points | verify | trace
  std::string suite;    // verify only
  std::string problem;
  Config config;
};

/// Loads the problem, runs the command and fills `report`. Input problems
/// raise InputError and oracle refusals BudgetError; verification failures
/// are reported through the return value.
int run_command(const Invocation& inv, RunReport& report, std::ostream& out);

/// Full driver: run_command plus error mapping, the summary record, the
/// --out file and the wall-clock line.
int execute(const Invocation& inv, const std::string& out_path, std::ostream& out, std::ostream& err);

}  // namespace canreg::cli
