#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace magnomech {

// Runs one command line (without the program name). Returns the exit code:
// 0 all PASS/VACUOUS, 1 any FAIL, 2 input error (JSON on `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace magnomech
