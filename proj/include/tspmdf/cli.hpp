#pragma once

namespace tspmdf {

/// The whole command-line surface (subcommands generate, train, solve, eval,
/// ablate). Returns the process exit code: 0 on success, nonzero after
/// printing a one-line diagnostic to stderr. Exposed as a function so tests
/// can drive the binary in-process.
int run_cli(int argc, const char* const* argv);

}  // namespace tspmdf
