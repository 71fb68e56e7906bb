#pragma once
#include <iosfwd>
#include <string>

#include "nestsolve/problem.hpp"

namespace nestsolve {

enum ExitCode { kExitOk = 0, kExitNotNested = 1, kExitParse = 2, kExitInconclusive = 3, kExitInsufficient = 4 };

json cmd_analyze(const Problem& p);
// *code receives the exit code; the document is re-verified before success is reported
json cmd_solve(const Problem& p, const SolveOptions& opt, int* code);
json cmd_verify(const Problem& p, const json& solution, long window, int* code);

std::string analyze_text(const json& report);
std::string solve_text(const json& doc);
std::string verify_text(const json& report);

// maps an exception thrown by the commands to an exit code and a JSON error object
int error_to_json(const std::exception& e, json* out);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nestsolve
