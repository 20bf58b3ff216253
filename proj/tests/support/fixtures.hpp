#pragma once

#include <string>

#include "problem_io.hpp"

namespace fixtures {

inline std::string problem_path(const std::string& name) { return std::string(CANREG_PROBLEMS_DIR) + "/" + name; }

inline canreg::ProblemSpec load(const std::string& name) { return canreg::cli::load_problem(problem_path(name)).spec; }

}  // namespace fixtures
