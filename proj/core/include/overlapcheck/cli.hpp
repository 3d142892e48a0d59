#pragma once

namespace overlapcheck {

// Command-line entry point shared by the installed binary and the tests.
// Returns the process exit code: 0 success, 1 validation or config error,
// 2 I/O error. Failed commands leave no partial output files.
int cli_main(int argc, const char* const* argv);

}  // namespace overlapcheck
