#pragma once

#include "kslab/error.hpp"

namespace kslab::cli {

// 1 for validation errors, 2 for runtime errors.
int exit_code(ErrorKind kind);

// Full command line: parses, runs one subcommand, prints "<Kind>: <message>"
// to stderr on failure and returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace kslab::cli
