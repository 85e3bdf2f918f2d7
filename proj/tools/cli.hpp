#pragma once

#include <ostream>

namespace riemgauss::cli {

// Runs the command line; returns the process exit code
// (0 ok, 2 validation, 3 numerical diagnostic, 4 I/O).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riemgauss::cli
