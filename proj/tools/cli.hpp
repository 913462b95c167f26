#pragma once

namespace synthbal::cli {

// Parses argv and executes one subcommand. Returns the process exit status:
// 0 on success, nonzero with a single-line diagnostic on stderr otherwise.
int run_cli(int argc, const char* const* argv);

}  // namespace synthbal::cli
